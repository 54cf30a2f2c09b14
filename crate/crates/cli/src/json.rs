//! Canonical JSON: sorted keys, floats as `{:.16e}` (17 significant digits), no
//! whitespace. Non-finite reals are written as the strings `"inf"`, `"-inf"`, `"NaN"`.

use std::fmt::Write;

use projdyn_core::limit_sets::{PointSet, SubspaceUnion};
use projdyn_core::linalg::{CMatrix, Subspace, C64};
use serde_json::{json, Map, Value};

pub fn real(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::String("NaN".into()),
        None if x > 0.0 => Value::String("inf".into()),
        None => Value::String("-inf".into()),
    }
}

pub fn complex(z: C64) -> Value {
    Value::Array(vec![real(z.re), real(z.im)])
}

pub fn vector(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

/// Row-major nested `[re, im]` pairs.
pub fn matrix(m: &CMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector(m.row(i))).collect())
}

/// Canonical orthonormal basis, one `[re, im]` vector per column.
pub fn subspace(s: &Subspace) -> Value {
    let b = s.canonical_basis();
    json!({
        "projective_dim": s.dim() as i64 - 1,
        "basis": Value::Array(b.columns().iter().map(|c| vector(c)).collect()),
    })
}

pub fn union(u: &SubspaceUnion) -> Value {
    Value::Array(u.components().iter().map(subspace).collect())
}

pub fn point_set(p: &PointSet) -> Value {
    match p {
        PointSet::Empty => json!({"marker": "empty", "components": []}),
        PointSet::WholeSpace => json!({"marker": "whole_space", "components": "whole_space"}),
        PointSet::Union(u) => json!({"marker": p.marker(), "components": union(u)}),
    }
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn write_str(out: &mut String, s: &str) {
    // serde_json's string escaping is already canonical
    out.push_str(&serde_json::to_string(s).expect("strings serialize"));
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                let x = n.as_f64().expect("finite");
                write!(out, "{x:.16e}").unwrap();
            }
        }
        Value::String(s) => write_str(out, s),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, x);
            }
            out.push(']');
        }
        Value::Object(o) => {
            let mut keys: Vec<&String> = o.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_str(out, k);
                out.push(':');
                write_value(out, &o[k]);
            }
            out.push('}');
        }
    }
}

pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let v = json!({"b": 1.5, "a": [1, -2], "c": {"z": null, "y": "q"}});
        assert_eq!(to_canonical_string(&v), "{\"a\":[1,-2],\"b\":1.5000000000000000e0,\"c\":{\"y\":\"q\",\"z\":null}}\n");
    }

    #[test]
    fn floats_round_trip_bit_exactly() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX] {
            let s = to_canonical_string(&real(x));
            assert_eq!(s.trim().parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(real(f64::NAN), Value::String("NaN".into()));
        assert_eq!(real(f64::NEG_INFINITY), Value::String("-inf".into()));
    }

    #[test]
    fn point_set_markers() {
        assert_eq!(to_canonical_string(&point_set(&PointSet::Empty)), "{\"components\":[],\"marker\":\"empty\"}\n");
        assert_eq!(
            to_canonical_string(&point_set(&PointSet::WholeSpace)),
            "{\"components\":\"whole_space\",\"marker\":\"whole_space\"}\n"
        );
    }
}

//! Report assembly and emission (canonical JSON or a per-component CSV summary).

use projdyn_core::classification::{ClassificationResult, PUClassification};
use projdyn_core::decomposition::{self, BlockDecomposition, UnitaryDecomposition, XiData};
use projdyn_core::Error as CoreError;
use projdyn_core::grassmann::LoxodromicCertificate;
use projdyn_core::hermitian::{ParabolicCertificate, SelfCheckReport};
use projdyn_core::limit_sets::{LimitSetReport, PointSet, Region};
use projdyn_core::orbit::OrbitRun;
use projdyn_core::Tolerances;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::document::MatrixDocument;
use crate::json::{self, object, real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    CsvSummary,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub input: Option<MatrixDocument>,
    pub tolerances: Tolerances,
    /// Top-level members besides `command`, `input`, `tolerances` and `warnings`.
    pub sections: Vec<(String, Value)>,
    /// Named point sets, listed again by the CSV summary.
    pub sets: Vec<(String, PointSet)>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, input: Option<MatrixDocument>, tolerances: Tolerances) -> Report {
        Report { command: command.into(), input, tolerances, sections: Vec::new(), sets: Vec::new(), warnings: Vec::new() }
    }

    pub fn section(&mut self, name: &str, value: Value) {
        self.sections.push((name.into(), value));
    }

    pub fn to_value(&self) -> Value {
        let mut pairs = vec![
            ("command", Value::String(self.command.clone())),
            ("tolerances", tolerances(&self.tolerances)),
            ("warnings", json!(self.warnings)),
        ];
        if let Some(doc) = &self.input {
            pairs.push(("input", document(doc)));
        }
        let mut v = object(pairs);
        let map = v.as_object_mut().expect("object");
        for (k, s) in &self.sections {
            map.insert(k.clone(), s.clone());
        }
        v
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => json::to_canonical_string(&self.to_value()),
            Format::CsvSummary => self.csv_summary(),
        }
    }

    /// One row per component: `set,index,marker,projective_dim,basis_sha256`. Empty and
    /// whole-space sets get a single row with index `-`.
    pub fn csv_summary(&self) -> String {
        let mut out = String::from("set,index,marker,projective_dim,basis_sha256\n");
        for (name, set) in &self.sets {
            match set {
                PointSet::Empty => out.push_str(&format!("{name},-,empty,-1,\n")),
                PointSet::WholeSpace => {
                    let dim = self.input.as_ref().map_or(-1, |d| d.n_plus_1 as i64 - 1);
                    out.push_str(&format!("{name},-,whole_space,{dim},\n"));
                }
                PointSet::Union(u) => {
                    for (i, c) in u.components().iter().enumerate() {
                        let basis = json::subspace(c);
                        let digest = hex::encode(Sha256::digest(json::to_canonical_string(&basis["basis"]).as_bytes()));
                        out.push_str(&format!("{name},{i},component,{},{digest}\n", c.dim() as i64 - 1));
                    }
                }
            }
        }
        out
    }
}

pub fn tolerances(t: &Tolerances) -> Value {
    json!({
        "unit_tol": real(t.unit_tol),
        "cluster_tol": real(t.cluster_tol),
        "det_tol": real(t.det_tol),
        "cond_cap": real(t.cond_cap),
    })
}

pub fn document(d: &MatrixDocument) -> Value {
    json!({
        "n_plus_1": d.n_plus_1,
        "matrix": json::matrix(&d.matrix),
        "label": d.label,
    })
}

pub fn classification(c: &ClassificationResult) -> Value {
    let e = &c.evidence;
    json!({
        "kind": c.kind.as_str(),
        "finite_order": c.finite_order,
        "evidence": {
            "eigenvalues": json::vector(&e.eigenvalues),
            "algebraic_mults": e.algebraic_mults,
            "moduli": e.moduli.iter().map(|&x| real(x)).collect::<Vec<_>>(),
            "diagonalizable": e.diagonalizable,
            "max_unit_deviation": real(e.max_unit_deviation),
            "marginal": e.marginal,
        },
    })
}

pub fn marginal_warning(c: &ClassificationResult, t: &Tolerances) -> Option<String> {
    c.evidence.marginal.then(|| {
        format!(
            "marginal unitarity: an eigenvalue modulus is {:.3e} away from 1, within a factor 2 of unit_tol = {:.1e}",
            c.evidence.max_unit_deviation, t.unit_tol
        )
    })
}

pub const KULKARNI_NOTE: &str = "the Kulkarni limit set is reported as the equicontinuity complement; \
the largest open sets where the group acts properly discontinuously can be strictly larger (see maximal_regions)";

/// Modulus blocks, each with the block decomposition of its unit-spectrum action.
pub fn unitary_decomposition(u: &UnitaryDecomposition, t: &Tolerances) -> Result<Value, CoreError> {
    let mut out = Vec::new();
    for b in &u.blocks {
        let bd = decomposition::block_decomposition(&b.gamma, t)?;
        out.push(json!({
            "r": real(b.r),
            "dim": b.subspace.dim(),
            "subspace": json::subspace(&b.subspace),
            "gamma": json::matrix(&b.gamma),
            "blocks": block_decomposition(&bd, &decomposition::xi_of(&bd)),
        }));
    }
    Ok(Value::Array(out))
}

pub fn block_decomposition(b: &BlockDecomposition, xi: &XiData) -> Value {
    json!({
        "blocks": b.blocks.iter().map(|blk| json!({
            "lambda": json::complex(blk.lambda),
            "dim": blk.dim(),
            "is_jordan": blk.is_jordan,
            "basis": json::matrix(&blk.basis),
        })).collect::<Vec<_>>(),
        "residual": real(b.residual),
        "height": xi.h,
        "xi": xi.xi.as_ref().map(json::subspace),
    })
}

fn region(r: &Region) -> Value {
    json!({ "complement": json::union(&r.complement) })
}

pub fn limit_sets(r: &LimitSetReport) -> Value {
    json!({
        "lambda": json::point_set(&r.lambda),
        "eq_complement": json::point_set(&r.eq_complement),
        "kulkarni": json::point_set(&r.kulkarni),
        "maximal_regions": r.maximal_regions.as_ref().map(|(a, b)| vec![region(a), region(b)]),
    })
}

pub fn parabolic_certificate(c: &ParabolicCertificate) -> Value {
    json!({
        "kind": "parabolic",
        "valid": true,
        "signature": [c.signature.0, c.signature.1],
        "jordan_sizes": c.jordan_sizes,
        "base": json::matrix(&c.base),
        "direction": json::matrix(&c.direction),
        "z": json::subspace(&c.z),
        "w": json::subspace(&c.w),
        "invariance_residual": real(c.invariance_residual),
    })
}

pub fn loxodromic_certificate(c: &LoxodromicCertificate) -> Value {
    json!({
        "kind": "loxodromic",
        "valid": true,
        "grassmann_k": c.grassmann_k,
        "attracting_subspace": json::subspace(&c.attracting_subspace),
        "attracting_point": json::vector(&c.attracting_point),
        "frame": json::matrix(&c.frame),
        "radius": real(c.radius),
        "contraction": {
            "radius": real(c.contraction.radius),
            "samples": c.contraction.samples,
            "max_image_angle": real(c.contraction.max_image_angle),
            "margin": real(c.contraction.margin),
        },
        "excluded_witness": json::vector(&c.excluded_witness),
        "excluded_margin": real(c.excluded_margin),
        "plucker_defect": real(c.plucker_defect),
    })
}

pub fn failed_certificate(kind: &str, error: &str) -> Value {
    json!({ "kind": kind, "valid": false, "error": error })
}

pub fn pu_classification(p: &PUClassification) -> Value {
    json!({
        "kind": p.kind.as_str(),
        "signature": [p.signature.0, p.signature.1],
        "fixed_point_witness": json::vector(&p.fixed_point_witness),
        "witness_form_value": real(p.witness_form_value),
    })
}

pub fn orbit(run: &OrbitRun, hausdorff: Option<f64>) -> Value {
    json!({
        "seeds": run.seed_points.len(),
        "iterations": run.iterations,
        "step": run.settings.step,
        "burn_in": run.settings.burn_in,
        "cluster_radius": real(run.settings.cluster_radius),
        "min_visits": run.settings.min_visits,
        "transient": run.transient,
        "cluster_count": run.cluster_points.len(),
        "clusters": run.cluster_points.iter().map(|c| json!({
            "point": json::vector(&c.point),
            "visits": c.visits,
        })).collect::<Vec<_>>(),
        "hausdorff_to_lambda": hausdorff.map(real),
    })
}

pub fn selfcheck(r: &SelfCheckReport) -> Value {
    json!({
        "size": r.size,
        "samples": r.samples,
        "all_pass": r.all_pass(),
        "e1_membership": r.e1_membership,
        "intersection": { "ok": r.intersection_ok, "max_residual": real(r.intersection_max_residual) },
        "covering": { "ok": r.covering_ok, "solved": r.covering_solved, "w_locus": r.covering_w_locus },
        "signature": {
            "ok": r.signature_ok,
            "values": r.signatures.iter().map(|(rr, (p, q))| json!({"r": rr, "signature": [p, q]})).collect::<Vec<_>>(),
        },
        "exact_invariance": r.exact_invariance,
    })
}

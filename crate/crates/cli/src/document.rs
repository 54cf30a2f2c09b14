//! Matrix documents: `{"n_plus_1": n, "matrix": [[[re, im], ...], ...], "label": "..."}`.

use std::io::Read;
use std::path::Path;

use projdyn_core::linalg::{CMatrix, C64};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixDocument {
    pub n_plus_1: usize,
    pub matrix: CMatrix,
    pub label: Option<String>,
}

/// Reads a document from `path`, or from stdin when `path` is `-`.
pub fn parse_matrix_file(path: &Path) -> Result<MatrixDocument, DocumentError> {
    let io = |source| DocumentError::Io { path: path.display().to_string(), source };
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
    } else {
        text = std::fs::read_to_string(path).map_err(io)?;
    }
    parse_matrix_str(&text)
}

/// Parses a matrix document. A report (an object with an `input` member) is accepted
/// too, and its input document is returned.
pub fn parse_matrix_str(text: &str) -> Result<MatrixDocument, DocumentError> {
    let value: Value = serde_json::from_str(text).map_err(|e| DocumentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match value.get("input") {
        Some(inner) => from_value(inner),
        None => from_value(&value),
    }
}

fn shape(msg: impl Into<String>) -> DocumentError {
    DocumentError::Shape(msg.into())
}

/// Numbers, or strings holding a float (`"NaN"`, `"inf"` and the like).
fn real(v: &Value, row: usize, col: usize) -> Result<f64, DocumentError> {
    let x = match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| shape(format!("entry ({row}, {col}) is not a real number")))?,
        Value::String(s) => {
            s.trim().parse::<f64>().map_err(|_| shape(format!("entry ({row}, {col}) is not a real number: {s:?}")))?
        }
        _ => return Err(shape(format!("entry ({row}, {col}) is not a real number"))),
    };
    if !x.is_finite() {
        return Err(DocumentError::NonFiniteEntry { row, col });
    }
    Ok(x)
}

pub fn from_value(value: &Value) -> Result<MatrixDocument, DocumentError> {
    let obj = value.as_object().ok_or_else(|| shape("document must be a JSON object"))?;
    let rows = obj.get("matrix").and_then(Value::as_array).ok_or_else(|| shape("missing \"matrix\" array"))?;
    let n = rows.len();
    if n == 0 {
        return Err(shape("matrix has no rows"));
    }
    if let Some(declared) = obj.get("n_plus_1") {
        let d = declared.as_u64().ok_or_else(|| shape("\"n_plus_1\" must be a positive integer"))?;
        if d as usize != n {
            return Err(shape(format!("\"n_plus_1\" is {d} but the matrix has {n} rows")));
        }
    }
    let label = match obj.get("label") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(shape("\"label\" must be a string")),
    };
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| shape(format!("row {i} is not an array")))?;
        if row.len() != n {
            return Err(shape(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for (j, entry) in row.iter().enumerate() {
            let pair = entry.as_array().filter(|p| p.len() == 2);
            let pair = pair.ok_or_else(|| shape(format!("entry ({i}, {j}) must be a [re, im] pair")))?;
            m[(i, j)] = C64::new(real(&pair[0], i, j)?, real(&pair[1], i, j)?);
        }
    }
    Ok(MatrixDocument { n_plus_1: n, matrix: m, label })
}

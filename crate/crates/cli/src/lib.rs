//! Command-line front end for `projdyn-core`: matrix documents in, canonical JSON or CSV
//! reports out.

pub mod cli;
pub mod document;
pub mod json;
pub mod report;

pub use cli::{run, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};
pub use document::{parse_matrix_file, parse_matrix_str, DocumentError, MatrixDocument};
pub use report::{Format, Report};

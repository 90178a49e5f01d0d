//! Crate-wide error type.

use thiserror::Error;

/// Failure modes surfaced by builders, evaluators and the model front end.
///
/// `Unsupported` marks structurally impossible requests (they map to their
/// own process exit status), as opposed to `Invalid*` which mark data that
/// fails validation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("kernel mismatch: {0}")]
    KernelMismatch(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("invalid grading: {0}")]
    InvalidGrading(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("evaluation out of range: {0}")]
    OutOfRange(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("model error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;

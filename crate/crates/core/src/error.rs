use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid drawing: {0}")]
    InvalidDrawing(String),

    #[error("degenerate drawing: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty training set")]
    EmptySet,

    #[error(
        "svm did not converge after {iterations} iterations (max KKT violation {violation:e})"
    )]
    NotConverged { iterations: usize, violation: f64 },

    #[error("infeasible generator spec: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

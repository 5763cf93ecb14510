use thiserror::Error;

/// Errors produced by tensor construction, contraction and the solvers.
///
/// Multi-indices carried in error values are 1-based, matching the file format.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate entry for index class {index:?}")]
    DuplicateEntry { index: Vec<usize> },

    #[error("index {index:?} out of range for dimension {dim}")]
    Index { index: Vec<usize>, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dim { expected: usize, got: usize },

    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("denominator is not positive: {0}")]
    Denominator(String),

    #[error("non-finite value encountered at iteration {iteration}")]
    Numerical { iteration: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use crate::funcspace::expr::{EvalError, ParseError};
use crate::linalg::Mode;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Operands disagree on dimension; both sides are named.
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },

    /// Operation requires the other scalar field.
    #[error("mode mismatch: operation requires {required} mode, space is {actual}")]
    ModeMismatch { required: Mode, actual: Mode },

    /// A documented precondition was violated by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The library detected an internally inconsistent value, e.g. a
    /// squared 2-norm far below zero, which signals a broken base product.
    #[error("internal consistency: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(#[from] ParseError),

    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),

    /// Expression evaluation failed at a specific sample point.
    #[error("{expr} failed at {location} {index} (t = {position}): {source}")]
    EvalAt {
        expr: String,
        location: &'static str,
        index: usize,
        position: f64,
        source: EvalError,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

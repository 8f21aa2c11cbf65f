use thiserror::Error;

use crate::manifold::ManifoldKind;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("basis has {available} functions but {required} were requested")]
    InsufficientBasis { required: usize, available: usize },

    #[error("truncation overflow: more than {cap} modes needed to reach the tail tolerance")]
    TruncationOverflow { cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("manifold mismatch: expected {expected}, found {found}")]
    ManifoldMismatch {
        expected: ManifoldKind,
        found: ManifoldKind,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("audit refused: {0}")]
    AuditRefused(String),

    #[error("code construction stopped after {achieved} strings (wanted {wanted}, draw budget {budget})")]
    ConstructionFailure {
        achieved: usize,
        wanted: usize,
        budget: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

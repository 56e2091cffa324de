use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("direction {s} out of range for a {k}-dimensional index (directions are 1-based)")]
    DirectionOutOfRange { s: usize, k: usize },

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("indices are not comparable: {i:?} is not <= {j:?}")]
    NotComparable { i: Vec<usize>, j: Vec<usize> },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid function spec: {0}")]
    InvalidFunction(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

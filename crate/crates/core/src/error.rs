use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HdqiError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{what}: work estimate {needed} exceeds budget {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("terms {0} and {1} anticommute")]
    NonCommuting(usize, usize),

    #[error("polynomial degree {degree} exceeds variable count {m}")]
    DegreeTooLarge { degree: usize, m: usize },

    #[error("negative target value {value} at grid point {point}")]
    NegativeValue { point: i64, value: f64 },

    #[error("normalisation vanishes: {0}")]
    ZeroNorm(&'static str),

    #[error(
        "anticommutation component of size {size} exceeds cap {cap}; \
         only bounded or logarithmic component sizes are supported"
    )]
    ComponentTooLarge { size: usize, cap: usize },

    #[error("relations are linearly dependent over F2")]
    DependentRelations,

    #[error("no string of weight {weight} in the requested coset")]
    EmptyCoset { weight: usize },

    #[error("rejection cap of {0} exceeded")]
    RejectionCap(u64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, HdqiError>;

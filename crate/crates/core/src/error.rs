use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown element {0}")]
    UnknownElement(String),

    #[error("relation is not a preorder")]
    NotPreorder,

    #[error("relation is not a partial order")]
    NotPartialOrder,

    #[error("r2 references pair {0} which is not in the closed r1")]
    DanglingR2Pair(String),

    #[error("preference system has no bounds (a_*, a^*)")]
    MissingBounds,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown ordinal level {level:?} in dimension {dimension}")]
    UnknownOrdinalLevel { dimension: String, level: String },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("constraint-form credal set has {states} states, above the cap of {cap}")]
    TooManyStates { states: usize, cap: usize },

    #[error("credal set is empty")]
    EmptyCredalSet,

    #[error("state mismatch: {0}")]
    StateMismatch(String),

    #[error("preference system is not consistent at delta = {0}")]
    InconsistentAtDelta(f64),

    #[error("design mismatch: {0}")]
    DesignMismatch(String),

    #[error("unknown subject {0}")]
    UnknownSubject(String),
}

use thiserror::Error;

/// Errors produced by the approximation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: operators must act on a space of dimension at least 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coefficient vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("state set is empty")]
    EmptySet,

    #[error("support is empty")]
    EmptySupport,

    #[error("support index {index} out of range for a set of {len} states")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("support indices must be strictly increasing")]
    UnsortedSupport,

    #[error("interpolation parameter {0} outside [0, 1]")]
    InvalidParameter(f64),

    #[error("states coincide; the pair formula is undefined")]
    DegeneratePair,

    #[error("states are collinear; the triple formula is undefined")]
    DegenerateTriple,

    #[error("{what} exceeds the limit of {limit}")]
    OverCap { what: &'static str, limit: usize },

    #[error("weights must be nonnegative and sum to one")]
    InvalidWeights,

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("unknown variant `{variant}` for fixture `{fixture}`")]
    UnknownVariant { fixture: String, variant: String },

    #[error("invalid input: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("variable x{index} out of range for dimension {dim} (at byte {position})")]
    VariableOutOfRange {
        index: usize,
        dim: usize,
        position: usize,
    },

    #[error("degree {got} below required minimum {required}")]
    DegreeTooLow { required: u32, got: u32 },

    #[error("degenerate variance: estimated sigma below {floor}")]
    DegenerateVariance { floor: f64 },

    #[error("need more than dim={dim} samples to whiten, got {n}")]
    TooFewSamples { n: usize, dim: usize },

    #[error("sample covariance singular beyond ridge repair")]
    SingularCovariance,

    #[error("line bracket carries zero probability mass")]
    ZeroMassBracket,

    #[error("density has no known normalization; operation needs a normalized density")]
    UnnormalizedDensity,

    #[error("dimension {dim} exceeds quadrature budget (max {max})")]
    DimTooLarge { dim: usize, max: usize },

    #[error("density does not integrate to 1 on the given domain: got {integral}")]
    NormalizationCheck { integral: f64 },

    #[error("no sample hits |f| <= t for any t in the grid")]
    NoSmallBallHits,

    #[error("non-finite value produced at index {index}")]
    NonFinite { index: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

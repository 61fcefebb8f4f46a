use thiserror::Error;

/// Errors raised by the library. Every variant is a validation failure of the
/// caller's input except `NonFinite`, which signals a numeric breakdown.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("sample contains a non-finite value at index {index}")]
    NonFiniteInput { index: usize },

    #[error("moment order must be at least {min}, got {got}")]
    OrderTooSmall { min: u32, got: u32 },

    #[error("moment order must be even, got {0}")]
    OddOrder(u32),

    #[error("sample size must be positive")]
    ZeroSampleSize,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("design matrix is rank deficient: {0}")]
    RankDeficient(String),

    #[error("value at index {index} must be positive, got {value}")]
    NonPositive { index: usize, value: f64 },

    #[error("numeric failure: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the segmentation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series must contain at least one sample")]
    EmptySeries,

    #[error("abscissae and ordinates differ in length ({xs} vs {ys})")]
    LengthMismatch { xs: usize, ys: usize },

    #[error("abscissae must be strictly increasing (violated at index {index})")]
    UnorderedAbscissae { index: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("a monotone fit needs an increasing or decreasing direction")]
    FlatDirection,

    #[error("invalid boundaries: {0}")]
    InvalidBoundaries(String),

    #[error("empty range [{start}, {end})")]
    EmptyRange { start: usize, end: usize },

    #[error("segment budget must be at least 1")]
    ZeroBudget,

    #[error("need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("oracle input too large: n = {n} exceeds {limit}")]
    OracleTooLarge { n: usize, limit: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

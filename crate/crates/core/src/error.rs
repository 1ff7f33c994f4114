use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not a half-integer")]
    NotHalfInteger(f64),

    #[error("n = {n} exceeds the enumeration cap {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("not a permutation of 1..={0}")]
    NotPermutation(usize),

    #[error("truncation cannot reach eps = {eps:e} within {cap} sites (best tail bound {achieved:e})")]
    Unachievable { eps: f64, cap: usize, achieved: f64 },

    #[error("singular factorization (pivot {pivot} has magnitude {magnitude:e})")]
    Singular { pivot: usize, magnitude: f64 },
}

impl Error {
    /// True for failures of a numeric procedure, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Unachievable { .. } | Error::Singular { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

use thiserror::Error;

/// Errors raised by the feature-selection library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid sample size n = {n}: {reason}")]
    InvalidSampleSize { n: usize, reason: &'static str },

    #[error("n = {n} is below the reference size n0 = {n0}; positive semidefiniteness is not guaranteed")]
    OutOfAsymptoticRange { n: usize, n0: usize },

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("too many degenerate trials: {discarded} of {attempted}")]
    TooManyDiscarded { discarded: u64, attempted: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

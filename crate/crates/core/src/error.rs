use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {grid} too small for cutoff {cutoff} (need at least {min})")]
    GridTooSmall { grid: usize, cutoff: usize, min: usize },

    #[error("unsupported Hermite degree {0} (maximum is 4)")]
    UnsupportedDegree(usize),

    #[error("negative Wick variance {0}")]
    NegativeVariance(f64),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("{rejected} of {total} importance weights were non-finite")]
    TooManyRejections { rejected: usize, total: usize },

    #[error("non-finite field at step {step}")]
    NonFiniteField { step: usize },

    #[error("empty sample set")]
    EmptySample,

    #[error("bad snapshot: {0}")]
    Snapshot(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument { name, reason: reason.into() }
}

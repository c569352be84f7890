use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time {t} outside the horizon [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("state norm {norm:e} exceeded the overflow guard at t = {t}")]
    Overflow { t: f64, norm: f64 },

    #[error("exceeded {max_steps} steps before reaching the horizon (stopped at t = {t})")]
    MaxStepsExceeded { t: f64, max_steps: usize },

    #[error("trajectory {index} of the batch failed: {source}")]
    Batch {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed weight file: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures raised while stepping an ODE, including batch wrappers around them.
    pub fn is_integration_failure(&self) -> bool {
        match self {
            Error::NonFinite { .. } | Error::Overflow { .. } | Error::MaxStepsExceeded { .. } => true,
            Error::Batch { source, .. } => source.is_integration_failure(),
            _ => false,
        }
    }

    pub fn is_file_error(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Parse(_))
    }
}

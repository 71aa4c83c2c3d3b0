use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (length mismatch, bad ratio input, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Parameters failed validation. Every failed check is listed.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// The exhaustive oracle refuses instances above its size limit.
    #[error("instance has {n} items, exact enumeration is limited to {limit}; use integer weights for the DP oracle or skip")]
    OracleCapacity { n: usize, limit: usize },

    /// The DP oracle needs integral weights and capacity within a memory budget.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

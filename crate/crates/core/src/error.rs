use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("partial likelihood undefined: no events in sample")]
    NoEvents,

    #[error("no comparable pairs for concordance")]
    NoComparablePairs,

    #[error("objective diverged at epoch {epoch} (value {value})")]
    Diverged { epoch: usize, value: f64 },

    #[error("path fit failed at lambda = {lambda}: {source}")]
    PathFailed {
        lambda: f64,
        #[source]
        source: Box<Error>,
        /// Entries completed before the failure.
        partial: Box<crate::path::PathResult>,
    },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

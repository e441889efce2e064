use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Array lengths or matrix shapes disagree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A tuning parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Input values violate a domain invariant (non-finite entries, off-simplex weights, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// The pair-cost cache was invalidated and must be rebuilt before use.
    #[error("pair-cost cache is stale; rebuild it after the weights change")]
    StaleCache,

    /// A CSV cell could not be ingested.
    #[error("{path}: row {row}, column {column}: {message}")]
    Ingest {
        path: PathBuf,
        /// 1-based data row (header excluded).
        row: usize,
        /// 1-based column index, or the column name when a header is present.
        column: String,
        message: String,
    },

    /// A result document does not follow the expected schema.
    #[error("result document: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

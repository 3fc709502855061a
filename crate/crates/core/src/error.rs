use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario, bound or experiment configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// Arguments are inconsistent (dimension mismatch, empty input, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// A numerical kernel hit a breakdown (non-positive pivot, zero power, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

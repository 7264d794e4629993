//! Error type shared across the toolkit.

use std::path::PathBuf;
use thiserror::Error;

/// All failures surfaced by the library.
///
/// The CLI maps variants onto exit codes: config/validation problems exit 2,
/// file problems exit 3, numeric verification failures exit 1.
#[derive(Debug, Error)]
pub enum SmieError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed file contents: bad magic, truncated payload, invalid JSON.
    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },

    /// Inputs that violate a documented precondition or invariant.
    #[error("{0}")]
    Validation(String),

    /// Bad run configuration (unknown field, out-of-range value).
    #[error("config error: {0}")]
    Config(String),

    /// Non-finite values where finite math is required; aborts training.
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl SmieError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SmieError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        SmieError::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SmieError>;

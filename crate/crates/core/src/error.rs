use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator, optimizer and file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or result file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A value violates a documented invariant. `field` names the offending
    /// field using `Type.field` notation.
    #[error("validation error: {field}: {message}")]
    Validation { field: String, message: String },

    /// Two points that must be distinct coincide.
    #[error("geometry error: coincident points ({x}, {y})")]
    CoincidentPoints { x: f64, y: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A saved optimization result violates one of its invariants.
    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Tensor dimensions disagree (image vs. mask, dataset vs. model, ...).
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A numeric parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// A file does not conform to its binary format.
    #[error("malformed {format}: {detail}")]
    Format { format: &'static str, detail: String },

    /// The requested operation cannot run with the given configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn format(format: &'static str, detail: impl Into<String>) -> Self {
        Error::Format { format, detail: detail.into() }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

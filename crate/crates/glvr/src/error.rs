//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// File-format failures keep their own variants (`BadMagic`, `Version`,
/// `Truncated`) so callers can tell a corrupt header from a short read.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimMismatch {
        context: String,
        expected: String,
        actual: String,
    },

    /// A layer in a network cannot consume the previous layer's output.
    #[error("layer {layer}: expected input dim {expected}, got {actual}")]
    ChainBreak {
        layer: usize,
        expected: usize,
        actual: usize,
    },

    #[error("bad magic: expected {expected:?}, got {actual:?}")]
    BadMagic { expected: [u8; 4], actual: [u8; 4] },

    #[error("unsupported format version {actual}, expected {expected}")]
    Version { expected: u32, actual: u32 },

    #[error("truncated file: need {expected} bytes, have {actual}")]
    Truncated { expected: u64, actual: u64 },

    /// Invalid configuration, parameter, or malformed input value.
    #[error("invalid value: {0}")]
    Invalid(String),

    /// A computation produced NaN or infinity. `step` is the iteration
    /// index when the failure happened inside an iterative loop.
    #[error("non-finite {what}{}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    NonFinite { what: String, step: Option<u64> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn dim(
        context: impl Into<String>,
        expected: impl ToString,
        actual: impl ToString,
    ) -> Self {
        Error::DimMismatch {
            context: context.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input {0}")]
    NonFiniteInput(String),

    #[error("generator index {index} out of range for {count} generators")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("semigroup words must contain at least one generator")]
    EmptyWord,

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("word enumeration would produce {count} words, exceeding the cap of {cap}")]
    WordCapExceeded { count: u128, cap: usize },

    #[error("viewports differ")]
    ViewportMismatch,

    #[error("invalid viewport: {0}")]
    InvalidViewport(String),

    #[error("point {0} lies outside the viewport")]
    OutsideViewport(String),

    #[error("mask is empty")]
    EmptyMask,

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config line {line}: {reason}")]
    ConfigSyntax { line: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

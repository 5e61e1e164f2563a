//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid generating vector: {0}")]
    InvalidGeneratingVector(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("numeric overflow at order {order}: {context}")]
    Overflow { order: usize, context: String },

    #[error("weights inadmissible for this lambda: {0}")]
    Inadmissible(String),

    #[error("singular kernel matrix (zero circulant eigenvalue); adjust kernel weights")]
    SingularKernel,

    #[error("non-finite loss at epoch {epoch}")]
    NanLoss { epoch: usize },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::OutOfRange(msg.into())
    }
}

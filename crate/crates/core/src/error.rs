use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An exact division or parity precondition failed. Never expected for
    /// correct inputs; signals an implementation bug or corrupted data.
    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("cache version mismatch in {path}: expected `ROMIKCACHE v1`, found `{found}`")]
    CacheVersion { path: PathBuf, found: String },

    #[error("cache parse error in {path} line {line}: {message}")]
    CacheParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

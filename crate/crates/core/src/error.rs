//! Error type shared across the pipeline.
//!
//! Variants map 1:1 onto the CLI exit codes: usage-class errors
//! (`InvalidArgument`, `EmptyQuery`, `NotFound`) exit 1, `Io` exits 2,
//! `Parse`/`Config` exit 3, `Integrity` exits 4.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file. `offset` is the byte position the reader had
    /// reached when the problem was detected.
    #[error("parse error in {path} at byte {offset}: {message}")]
    Parse {
        path: PathBuf,
        offset: u64,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    /// Cross-artifact inconsistency (duplicate ids, manifest hash mismatch).
    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("query cleans to zero tokens")]
    EmptyQuery,

    #[error("not found: {0}")]
    NotFound(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, offset: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            offset,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

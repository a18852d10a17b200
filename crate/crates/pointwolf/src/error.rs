//! Error type shared by the whole crate.

use std::path::PathBuf;

/// Errors produced by augmentation, corruption, I/O, and pipeline code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violated its documented range or precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input data was structurally unusable (empty cloud, non-finite coordinate, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A cloud file failed to parse; `line` is 1-based.
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// An I/O operation failed; the path gives context.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A confidence oracle failed while scoring a sample.
    #[error("oracle evaluation failed ({context}): {msg}")]
    Oracle { context: String, msg: String },

    /// A pipeline configuration file was malformed.
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

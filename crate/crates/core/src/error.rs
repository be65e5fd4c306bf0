use std::path::PathBuf;

use thiserror::Error;

/// Every failure surfaced by the toolkit.
///
/// The variants group into the CLI's exit-code classes through
/// [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("dead end: node {0} has no neighbors")]
    DeadEnd(usize),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 usage, 2 generation failure, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parse { .. } | Error::Io { .. } => 1,
            Error::Generation(_) => 2,
            Error::Numeric(_) | Error::DeadEnd(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

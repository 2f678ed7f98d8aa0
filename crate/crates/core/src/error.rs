//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classification used by callers that map errors to exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input data, violated invariants.
    Data,
    /// Filesystem or network failures.
    Io,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("fetch failed for gutenberg id {gutenberg_id}: {}",
        attempts.iter().map(|(u, s)| format!("{u} -> {s}")).collect::<Vec<_>>().join(", "))]
    Fetch {
        gutenberg_id: u64,
        /// (url, status or transport error) per attempted pattern.
        attempts: Vec<(String, String)>,
    },

    #[error("invalid gutenberg id {0}: must be positive")]
    InvalidGutenbergId(u64),

    #[error("malformed boilerplate: {0}")]
    Boilerplate(String),

    #[error("{path}: row {row}: {msg}")]
    Catalog {
        path: PathBuf,
        row: u64,
        msg: String,
    },

    #[error("{path}:{line}: {msg}")]
    Conllu {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid lexicon: {0}")]
    Lexicon(String),

    #[error("{path}:{line}: {msg}")]
    VecFile {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {msg}")]
    Norms { path: PathBuf, msg: String },

    #[error("no vector derivable for {0:?}")]
    Oov(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{0}")]
    Stats(String),

    #[error("{0}")]
    Train(String),

    #[error("malformed model file {path}: {msg}")]
    Model { path: PathBuf, msg: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach a pipeline stage name for context when propagating upstream errors.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } | Error::Fetch { .. } => ErrorKind::Io,
            Error::Stage { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }
}

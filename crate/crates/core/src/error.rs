use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("unknown user id {0}")]
    UnknownUser(usize),
    #[error("a user cannot be paired with itself (id {0})")]
    SelfPair(usize),
    #[error("ring needs at least 3 slots, got {0}")]
    RingTooSmall(usize),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::path::PathBuf;

use crate::memory::ObjectId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed manifest {path}: {reason}")]
    MalformedManifest { path: PathBuf, reason: String },

    #[error("malformed embedding payload {path}: {reason}")]
    MalformedPayload { path: PathBuf, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown object {0}")]
    UnknownObject(ObjectId),

    #[error("self edge on object {0}")]
    SelfEdge(ObjectId),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no labels for {0}")]
    Unlabeled(String),

    #[error("unsupported snapshot format version {found} (expected {expected})")]
    SnapshotVersion { expected: u32, found: u32 },

    #[error("corrupted snapshot: {0}")]
    CorruptedSnapshot(String),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad caller input (arguments, missing or
    /// malformed files) rather than failures while running.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::MalformedManifest { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidArgument(_)
                | Error::Empty(_)
        ) || matches!(self, Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound)
    }
}

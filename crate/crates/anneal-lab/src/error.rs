use std::path::PathBuf;

/// Crate-wide error type. Variants are grouped by subsystem; message strings
/// carry the specifics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("topology: {0}")]
    Topology(String),
    #[error("instance: {0}")]
    Instance(String),
    #[error("schedule: {0}")]
    Schedule(String),
    #[error("params: {0}")]
    Params(String),
    #[error("exact solver: {0}")]
    Exact(String),
    #[error("stats: {0}")]
    Stats(String),
    #[error("experiment: {0}")]
    Experiment(String),
    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attach a path to a raw io error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), msg: msg.into() }
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// Every variant names the pipeline stage it comes from so the CLI can report
/// "module: offending item" without extra bookkeeping.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ingest: invalid UTF-8 in {source_name} at byte offset {offset}")]
    Encoding { source_name: String, offset: usize },

    #[error("ingest: empty document {source_name}")]
    EmptyDocument { source_name: String },

    #[error("config: invalid fragmentation pattern `{pattern}`: {message}")]
    InvalidPattern { pattern: String, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("graph: relation references unknown sentence `{0}`")]
    DanglingEdge(String),

    #[error("graph: {0}")]
    Graph(String),

    #[error("csv: {path}: line {line}: {message}")]
    MalformedCsv {
        path: String,
        line: u64,
        message: String,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

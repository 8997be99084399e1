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

    #[error("SPARQL request to {endpoint} failed{}: {message}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Http {
        endpoint: String,
        status: Option<u16>,
        message: String,
        retryable: bool,
    },

    #[error("malformed SPARQL results: {0}")]
    SparqlParse(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate doc_id {0:?}")]
    DuplicateDocId(String),

    #[error("unknown relation label {0:?}")]
    UnknownLabel(String),

    #[error("unknown doc_id(s): {}", .0.join(", "))]
    MissingDocs(Vec<String>),

    #[error("requested {requested} negative pairs but only {available} admissible pairs exist")]
    InsufficientPairs { requested: usize, available: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("class {class} has {count} samples, fewer than k={k}")]
    ClassTooSmall { class: String, count: usize, k: usize },

    #[error("training diverged at epoch {epoch}: loss is {loss} (try a smaller learning rate)")]
    NonFiniteLoss { epoch: usize, loss: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the failure comes from the environment (files, network) rather than from the data.
    pub fn is_environmental(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Http { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::io;

/// Errors raised across the toolkit.
///
/// Variants map onto CLI exit codes through [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node id {id} out of range (num_nodes = {num_nodes})")]
    NodeRange { id: usize, num_nodes: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("negative sampling exhausted after {attempts} attempts ({accepted} of {requested} accepted)")]
    Exhausted {
        attempts: usize,
        accepted: usize,
        requested: usize,
    },

    #[error("ingestion error: {0}")]
    Ingest(String),

    #[error("fixture error: {0}")]
    Fixture(String),

    #[error("scorer failed on pair ({u}, {v}): {source}")]
    Scorer {
        u: usize,
        v: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code: 1 usage, 2 data, 3 numeric, 4 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 3,
            Error::Verification(_) => 4,
            Error::Config(_) | Error::Contract(_) | Error::Domain(_) => 1,
            Error::Scorer { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

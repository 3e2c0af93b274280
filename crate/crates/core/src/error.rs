use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameter validation failed: {}", violated.join(", "))]
    Validation { violated: Vec<String> },

    #[error("non-finite value in {context} at iteration {iteration}")]
    NonFinite { context: &'static str, iteration: usize },

    #[error("oracle has no underlying deterministic mapping to compare against")]
    MissingMapping,

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("replication {replication}: {source}")]
    Replication {
        replication: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Config(String),

    #[error("parse: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Category used for process exit codes: 2 config, 3 validation, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. } => 3,
            Error::NonFinite { .. } | Error::NotConverged { .. } | Error::MissingMapping => 4,
            Error::Replication { source, .. } => source.exit_code(),
            Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::Config(_)
            | Error::Parse(_)
            | Error::Io(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            3 => "validation",
            4 => "numerical",
            _ => "config",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Config(e.message().to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            if let csv::ErrorKind::Io(io) = e.into_kind() {
                return Error::Io(io);
            }
            unreachable!("io kind checked above");
        }
        Error::Parse(e.to_string())
    }
}

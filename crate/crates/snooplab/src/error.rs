//! Error types shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A simulation or experiment configuration violates an invariant
    /// (odd sample size, correlation outside its range, and so on).
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// An operation was called with arguments outside its contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The regression design is rank deficient (or numerically so);
    /// the caller decides whether to skip, count, or abort.
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    /// A candidate estimator could not be fit on the provided rows.
    #[error("degenerate candidate: {0}")]
    DegenerateCandidate(String),

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("failed to read {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },

    /// Config file did not parse or contained unknown keys; the message
    /// carries the key path and line reported by the parser.
    #[error("failed to parse {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid_config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Exit code for the command line: config problems are distinguished
    /// from runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_)
            | Error::InvalidArgument(_)
            | Error::ConfigRead { .. }
            | Error::ConfigParse { .. } => 2,
            _ => 1,
        }
    }
}

use thiserror::Error;

/// Errors surfaced by the learners, losses and data loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("classification label must be -1 or +1, got {0}")]
    InvalidLabel(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Unsupported or inconsistent configuration, detected before a run starts.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error in round {round}: {message}")]
    Numerical { round: u64, message: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

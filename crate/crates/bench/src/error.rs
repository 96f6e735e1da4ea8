use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] metagrad::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

impl BenchError {
    /// 1 for configuration, 2 for data, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use metagrad::Error as E;
        match self {
            BenchError::Config(_) => 1,
            BenchError::Data(_) | BenchError::Io(_) | BenchError::Csv(_) => 2,
            BenchError::Numerical(_) => 3,
            BenchError::Core(e) => match e {
                E::Config(_) => 1,
                E::Numerical { .. } => 3,
                E::DimensionMismatch { .. }
                | E::InvalidLabel(_)
                | E::InvalidInput(_)
                | E::Parse { .. }
                | E::Data(_)
                | E::Io(_) => 2,
            },
        }
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin count must be at least 2, got {0}")]
    TooFewSpins(usize),

    #[error("n = {n} exceeds the enumeration cap of {cap} spins")]
    CapExceeded { n: usize, cap: usize },

    #[error("configuration {bits:#b} is out of range for {n} spins")]
    ConfigOutOfRange { bits: u64, n: usize },

    #[error("bit index {index} is out of range for {n} spins")]
    BitOutOfRange { index: usize, n: usize },

    #[error("ground energy {e_gs} is not negative; instance is ineligible for AEAR benchmarking")]
    Ineligible { e_gs: f64 },

    #[error("matrix is not column-stochastic (column {column} sums to {sum})")]
    NotStochastic { column: usize, sum: f64 },

    #[error("state norm deviates from 1 by {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("solution count must be in 1..=2^n, got {0}")]
    InvalidSolutionCount(u64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid instance data: {0}")]
    InvalidInstance(String),

    #[error("fit requires at least 3 distinct sizes with positive values: {0}")]
    DegenerateFit(String),

    #[error("empty sample")]
    EmptySample,

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

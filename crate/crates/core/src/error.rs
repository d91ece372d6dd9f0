use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("exponent must be positive, got {0}")]
    InvalidExponent(f64),

    #[error("{0}")]
    ParameterRange(String),

    #[error("operator is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("filtration index {index} out of range 0..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("term {index} is not in the filtration subalgebra (deviation {deviation:e})")]
    NotAdapted { index: usize, deviation: f64 },

    #[error("term {index} is not a martingale difference (deviation {deviation:e})")]
    NotMartingaleDifference { index: usize, deviation: f64 },

    #[error("sequence length {got} does not match filtration length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("factorization mismatch at term {index}: {deviation:e}")]
    FactorizationMismatch { index: usize, deviation: f64 },

    #[error("invalid couple ({p}, {q}): need 1 <= p < q <= inf")]
    InvalidCouple { p: f64, q: f64 },

    #[error("invalid Orlicz function: {0}")]
    InvalidOrlicz(String),

    #[error("complementary function is unbounded at s = {0}")]
    UnboundedConjugate(f64),

    #[error("numeric derivative failed at t = {0}")]
    DerivativeFailure(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("instance {id} (seed {seed}): {message}")]
    Instance { id: usize, seed: u64, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

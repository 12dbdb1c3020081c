use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),

    #[error("unknown connection `{0}`")]
    UnknownConnection(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("constant term of the connection is not nilpotent ({0})")]
    NotNilpotent(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precision failure: {0}")]
    Precision(String),

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("connection `{0}` carries no Gamma-class decomposition")]
    MissingDecomposition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

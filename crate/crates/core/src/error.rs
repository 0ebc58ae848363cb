use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A polynomial handed to the compiler exceeds modulus one somewhere on the check grid.
    #[error("polynomial is not bounded by 1 (grid sup = {sup})")]
    NotBounded { sup: f64 },

    /// Neither the analytic completion nor the numerical fit reached the acceptance residual.
    #[error("compilation failed{context}: best residual {best_residual:e}")]
    CompileFailed { best_residual: f64, context: String },

    /// Dense simulation requested above the size guard.
    #[error("dense simulation of {qubits} qubits exceeds the guard of {limit}")]
    TooLarge { qubits: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integer overflow computing Jackson weights for N = {n}, K = {k}")]
    Overflow { n: usize, k: usize },

    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

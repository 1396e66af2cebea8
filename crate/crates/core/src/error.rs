use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {function} at x = {x}")]
    Pole { function: &'static str, x: f64 },

    #[error("{function} overflows at x = {x}")]
    Overflow { function: &'static str, x: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("alpha*gamma <= 1/2: generalized regime not supported (alpha*gamma = {ag})")]
    GeneralizedOnly { ag: f64 },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("mode-sum truncation error {estimate:e} exceeds budget {budget:e}")]
    TruncationBudget { estimate: f64, budget: f64 },

    #[error("circulant embedding has negative eigenvalue {min_eig:e}")]
    EmbeddingFailure { min_eig: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate fit range: {0}")]
    DegenerateRange(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("rejection sampler exhausted its budget: acceptance rate {rate:.3e}")]
    RejectionBudget { rate: f64 },

    #[error("optimizer failed: {0}")]
    OptimizerFailure(String),

    #[error("no crossover: {0}")]
    NoCrossover(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

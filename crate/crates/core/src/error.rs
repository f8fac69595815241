use thiserror::Error;

pub type Result<T> = std::result::Result<T, FrakturError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrakturError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("solver failure at step {step} after {iterations} iterations (residual {residual:.3e}): {reason}")]
    SolverFailure {
        step: usize,
        iterations: usize,
        residual: f64,
        reason: String,
    },
    #[error("singular system at step {step}")]
    SingularSystem { step: usize },
    #[error("line search failed: {0}")]
    LineSearch(String),
    #[error("inapplicable: {0}")]
    Inapplicable(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FrakturError {
    fn from(e: std::io::Error) -> Self {
        FrakturError::Io(e.to_string())
    }
}

impl From<csv::Error> for FrakturError {
    fn from(e: csv::Error) -> Self {
        FrakturError::Io(e.to_string())
    }
}

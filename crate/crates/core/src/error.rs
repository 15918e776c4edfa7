use thiserror::Error;

/// Errors produced by model construction and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("incompatible jump operators: {0}")]
    IncompatibleJumps(String),

    #[error("solver failure after {iterations} iterations (residual {residual:.3e}): {reason}")]
    SolverFailure {
        reason: String,
        iterations: usize,
        residual: f64,
    },

    #[error("integration failure in trajectory {trajectory} at t = {time}: {reason}")]
    IntegrationFailure {
        trajectory: usize,
        time: f64,
        reason: String,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("capacity exceeded: dimension {dim} exceeds limit {limit}")]
    CapacityExceeded { dim: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

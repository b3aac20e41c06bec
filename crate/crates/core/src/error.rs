//! Error type shared across the crate.

use thiserror::Error;

/// Alias for results produced by this crate.
pub type SimResult<T> = Result<T, SimError>;

/// Errors raised by construction, dynamics, and read-out routines.
#[derive(Debug, Clone, Error)]
pub enum SimError {
    /// Operands have incompatible shapes or dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix fails a required structural property (hermiticity,
    /// unitarity, positivity, ...).
    #[error("structural check failed: {0}")]
    NotStructured(String),

    /// A hidden-particle set violates the norm constraint beyond tolerance.
    #[error("invalid particle set: norm deviation {deviation:.3e} exceeds {tol:.3e}")]
    InvalidParticleSet { deviation: f64, tol: f64 },

    /// A runtime invariant (norm, trace, symplecticity) was breached during
    /// propagation.
    #[error("numerical invariant breached: {0}")]
    InvariantBreach(String),

    /// An iterative kernel failed to converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A requested problem size exceeds a documented guard.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Reading or writing an artifact file failed.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for SimError {
    fn from(e: serde_json::Error) -> Self {
        SimError::Io(format!("json: {e}"))
    }
}

impl From<csv::Error> for SimError {
    fn from(e: csv::Error) -> Self {
        SimError::Io(format!("csv: {e}"))
    }
}

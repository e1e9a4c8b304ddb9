use thiserror::Error;

/// Errors produced by the geometry, integration and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is off the manifold: {0}")]
    OffManifold(String),

    #[error("tangent vector is not orthogonal to its base point (<base, v>_L = {0:e})")]
    NotTangent(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "quadrature did not reach tolerance after {subdivisions} subdivisions \
         (estimate {estimate:e}, error estimate {error:e})"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

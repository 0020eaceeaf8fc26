use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported algebra dimension {0} (expected 2..=8)")]
    UnsupportedDimension(usize),

    #[error("grade {grade} out of range for dimension {dim}")]
    GradeOutOfRange { grade: usize, dim: usize },

    #[error("expected pure grade {expected}")]
    NotPureGrade { expected: usize },

    #[error("not an invertible blade")]
    NotInvertibleBlade,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("degenerate simplex at index {0}")]
    DegenerateSimplex(usize),

    #[error("inconsistent orientation: {0}")]
    InconsistentOrientation(String),

    #[error("relaxation did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },

    #[error("degenerate tangent blade at node {0}")]
    DegenerateTangent(usize),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("missing data: {0}")]
    Missing(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

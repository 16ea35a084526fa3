use thiserror::Error;

/// Errors raised by the operator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsoError {
    #[error("coordinate {index} is negative ({value})")]
    NegativeCoordinate { index: usize, value: f64 },
    #[error("coordinates sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("a simplex point needs at least 2 coordinates, got {0}")]
    TooShort(usize),
    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("permutation parse error: {0}")]
    Parse(String),
    #[error("not a bijection: {0}")]
    NotABijection(String),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("argument {0} outside [0, 1]")]
    OutOfDomain(f64),
    #[error("point is not a fixed point (residual {residual:e})")]
    NotAFixedPoint { residual: f64 },
    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid Lyapunov kind: {0}")]
    InvalidKind(String),
    #[error("invalid invariant-set descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("eigensolver did not converge within {0} sweeps")]
    EigenNoConvergence(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, QsoError>;

use thiserror::Error;

/// Errors raised by state validation and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not complex symmetric (deviation {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace {0} is not 1")]
    BadTrace(f64),

    #[error("state vector norm {0} is not 1")]
    BadNorm(f64),

    #[error("Kraus operators are not trace non-increasing (largest eigenvalue of sum K^dag K is {0})")]
    NotTraceNonIncreasing(f64),

    #[error("Kraus operators are not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("Kraus set is empty")]
    EmptyKrausSet,

    #[error("Kraus operator shapes differ: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("map does not commute with transposition (residual {0:e})")]
    NotCovariant(f64),

    #[error("{name} = {value} lies outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("factorization residual {0:e} exceeds tolerance")]
    Reconstruction(f64),

    #[error("root bracketing failed: {0}")]
    Bracketing(&'static str),

    #[error("bisection did not converge within {0} iterations")]
    BisectionFailed(usize),
}

pub type Result<T> = core::result::Result<T, Error>;

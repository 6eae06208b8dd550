use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("invalid degree: {0}")]
    Degree(String),
    #[error("Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("not a subalgebra: {0}")]
    NotSubalgebra(String),
    #[error("d∘d ≠ 0 in degree {0}")]
    NotAComplex(usize),
    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("matrix is singular or too ill-conditioned (|det| = {0:e})")]
    Singular(f64),
    #[error("form is not horizontal for the distinguished subalgebra")]
    NotHorizontal,
    #[error("form is not basic: {0}")]
    NotBasic(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("invariance check failed: {0}")]
    NotInvariant(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("finite-difference failure: {0}")]
    FiniteDifference(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

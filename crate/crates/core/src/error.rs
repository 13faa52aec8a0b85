use thiserror::Error;

/// Errors raised by the Toeplitz positivity toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("offset {offset} outside the admissible range |k| <= {bound}")]
    OffsetOutOfRange { offset: isize, bound: usize },

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("point {0} is not on the unit circle (|z| = {1})")]
    NotUnitModulus(String, f64),

    #[error("matrix is not selfadjoint (||M - M*|| = {deviation:e})")]
    NotSelfAdjoint { deviation: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degree {degree} exceeds the admissible bound {bound}")]
    DegreeMismatch { degree: usize, bound: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {p} is smaller than the required bound {m}")]
    PrimeTooSmall { p: u64, m: u64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("trigonometric polynomial is negative on the circle (min {min:e})")]
    NotPositive { min: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("no witness exists: the block Toeplitz matrix is positive semidefinite")]
    NoWitness,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

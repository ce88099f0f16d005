use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("capacity exceeded: N = {n} is above the dense N^2 x N^2 propagator limit of {limit}")]
    Capacity { n: usize, limit: usize },

    #[error("matrix is not unitary: max |U^dag U - I| = {defect:e}")]
    NotUnitary { defect: f64 },

    #[error("Wigner transform is numerically singular for N = {n} (smallest fold weight {min_weight:e})")]
    Singular { n: usize, min_weight: f64 },

    #[error("eigendecomposition did not converge: residual {residual:e}")]
    Convergence { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

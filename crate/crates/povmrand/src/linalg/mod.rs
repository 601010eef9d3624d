//! Complex linear algebra and entropy primitives.
//!
//! Tensor products use the fixed convention A (x) Q with the ancilla index
//! fastest-varying: the global index of (a, q) is `a * dim_q + q`.

mod eig;
mod entropy;
mod matrix;

pub use eig::{complete_isometry_to_unitary, hermitian_eig, matrix_sqrt_psd, unitarity_residual};
pub use entropy::{relative_entropy, shannon_entropy, von_neumann_entropy};
pub use matrix::{partial_trace, C64, ComplexMatrix, DensityState, Ket, Subsystem, DEFAULT_TOL};

pub(crate) use entropy::entropy_of_weights;

use thiserror::Error;

/// Errors raised by the numeric substrate.
#[derive(Debug, Clone, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (symmetry defect {0:.3e})")]
    NonHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("columns are not orthonormal (defect {0:.3e})")]
    NotIsometry(f64),
    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("not a probability distribution (offending value/sum {0})")]
    InvalidDistribution(f64),
}

//! Dense complex linear algebra for small Hermitian problems.

mod eigh;
mod matrix;
mod operator;
mod spectral;
mod tolerance;

pub use eigh::{eigh, Eigh};
pub use matrix::{
    basis_deviation, basis_vector, inner, kron_vec, norm, CVector, ComplexMatrix, ONE, ZERO,
};
pub use operator::{psd_sqrt, DensityState, HermitianOperator, MAX_DIM};
pub use spectral::{
    pinch, rank1_pinch, Cluster, SpectralDecomposition, BASIS_TOL, EIGENVECTOR_TOL,
};
pub use tolerance::{Tolerances, TOLERANCE_SCALE_ENV};

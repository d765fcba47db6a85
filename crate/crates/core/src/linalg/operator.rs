use num_complex::Complex64;

use super::eigh::{eigh, Eigh};
use super::matrix::ComplexMatrix;
use super::spectral::SpectralDecomposition;
use super::tolerance::Tolerances;
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 64;

/// Dense Hermitian matrix. Construction checks the Hermiticity invariant and
/// symmetrises away the residual below tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    hermiticity_tol: f64,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tol(matrix, Tolerances::default().hermiticity)
    }

    pub fn with_tol(matrix: ComplexMatrix, hermiticity_tol: f64) -> Result<Self> {
        let dim = matrix.dim();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > hermiticity_tol {
            return Err(Error::NonHermitian {
                deviation,
                tol: hermiticity_tol,
            });
        }
        let adj = matrix.adjoint();
        let matrix = (&matrix + &adj).scale_real(0.5);
        Ok(Self {
            matrix,
            hermiticity_tol,
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(diag))
    }

    /// `sum_k lambda_k |v_k><v_k|`
    pub fn from_spectrum(eigenvalues: &[f64], vectors: &[Vec<Complex64>]) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        let mut m = ComplexMatrix::zeros(dim);
        for (&l, v) in eigenvalues.iter().zip(vectors) {
            m = &m + &ComplexMatrix::projector(v).scale_real(l);
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn hermiticity_tol(&self) -> f64 {
        self.hermiticity_tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    pub fn eigh(&self) -> Result<Eigh> {
        eigh(self)
    }

    /// Spectral decomposition with the default relative clustering tolerance.
    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        self.spectral_with(&Tolerances::default())
    }

    pub fn spectral_with(&self, tol: &Tolerances) -> Result<SpectralDecomposition> {
        SpectralDecomposition::new(self, tol.cluster_threshold(self.frobenius_norm()))
    }

    /// `<v|A|v>` as a real number.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        self.matrix.sandwich(v, v).re
    }
}

/// Validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    operator: HermitianOperator,
    trace_tol: f64,
    psd_tol: f64,
}

impl DensityState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let operator = HermitianOperator::with_tol(matrix, tol.hermiticity)?;
        Self::from_operator(operator, tol)
    }

    pub fn from_operator(operator: HermitianOperator, tol: &Tolerances) -> Result<Self> {
        let trace = operator.matrix().trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::InvalidTrace {
                trace,
                tol: tol.trace,
            });
        }
        let min_eigenvalue = operator.eigh()?.eigenvalues[0];
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPsd {
                min_eigenvalue,
                tol: tol.psd,
            });
        }
        Ok(Self {
            operator,
            trace_tol: tol.trace,
            psd_tol: tol.psd,
        })
    }

    pub fn pure(v: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::projector(v))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.operator.matrix()
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn trace_tol(&self) -> f64 {
        self.trace_tol
    }

    pub fn psd_tol(&self) -> f64 {
        self.psd_tol
    }
}

/// `sqrt(A)` for a positive semidefinite operator, through its eigendecomposition.
/// Eigenvalues in `[-psd_tol, 0)`, and positive ones at the eigensolver's
/// rounding level, are clipped to zero.
pub fn psd_sqrt(op: &HermitianOperator, psd_tol: f64) -> Result<ComplexMatrix> {
    let e = op.eigh()?;
    let noise = 4.0 * op.dim() as f64 * f64::EPSILON * op.frobenius_norm();
    if let Some(&min_eigenvalue) = e.eigenvalues.first() {
        if min_eigenvalue < -psd_tol {
            return Err(Error::NotPsd {
                min_eigenvalue,
                tol: psd_tol,
            });
        }
    }
    let mut out = ComplexMatrix::zeros(op.dim());
    for (l, v) in e.eigenvalues.iter().zip(&e.eigenvectors) {
        out =
            &out + &ComplexMatrix::projector(v).scale_real(if *l > noise { l.sqrt() } else { 0.0 });
    }
    Ok(out)
}

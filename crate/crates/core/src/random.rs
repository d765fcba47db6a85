//! Random test instances: Hermitian matrices, unitaries, and density
//! operators with prescribed degeneracy.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{inner, CVector, ComplexMatrix, DensityState, HermitianOperator, ZERO};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// GUE-like Hermitian matrix `(G + G^dag) / 2` with unit-variance Gaussian `G`.
pub fn hermitian(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    let adj = g.adjoint();
    HermitianOperator::new((&g + &adj).scale_real(0.5)).expect("symmetrised matrix is Hermitian")
}

/// Orthonormal basis from Gram-Schmidt on Gaussian vectors.
pub fn unitary_basis(dim: usize, rng: &mut impl Rng) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v: CVector = (0..dim).map(|_| gaussian(rng)).collect();
        // Two passes keep the basis orthonormal to working precision.
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let n = crate::linalg::norm(&v);
        if n < 1e-6 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= n);
        basis.push(v);
    }
    basis
}

/// Columns of the returned matrix are `unitary_basis` vectors.
pub fn unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let basis = unitary_basis(dim, rng);
    ComplexMatrix::from_fn(dim, |i, j| basis[j][i])
}

/// Random probability vector of length `len`.
pub fn probabilities(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Density operator `sum_k lambda_k |v_k><v_k|` with eigenvalue multiplicities `multiplicities`.
pub fn density_with_multiplicities(multiplicities: &[usize], rng: &mut impl Rng) -> DensityState {
    let dim: usize = multiplicities.iter().sum();
    let q = probabilities(multiplicities.len(), rng);
    let mut eigenvalues = Vec::with_capacity(dim);
    for (&d, &qm) in multiplicities.iter().zip(&q) {
        eigenvalues.extend(std::iter::repeat_n(qm / d as f64, d));
    }
    density_in_basis(&eigenvalues, &unitary_basis(dim, rng))
}

/// Density operator with a random multiplicity pattern; degenerate with probability about 3/4 when `dim > 1`.
pub fn density(dim: usize, rng: &mut impl Rng) -> DensityState {
    let mut mults = Vec::new();
    let mut left = dim;
    while left > 0 {
        let d = if rng.random_bool(0.5) {
            1
        } else {
            rng.random_range(1..=left.min(3))
        };
        mults.push(d);
        left -= d;
    }
    density_with_multiplicities(&mults, rng)
}

/// `sum_k lambda_k |v_k><v_k|` normalised to unit trace.
pub fn density_in_basis(eigenvalues: &[f64], basis: &[CVector]) -> DensityState {
    let total: f64 = eigenvalues.iter().sum();
    let dim = basis.len();
    let mut m = ComplexMatrix::zeros(dim);
    for (l, v) in eigenvalues.iter().zip(basis) {
        m = &m + &ComplexMatrix::projector(v).scale_real(l / total);
    }
    // Exact Hermitian symmetrisation removes rounding in the off-diagonal entries.
    let adj = m.adjoint();
    DensityState::new((&m + &adj).scale_real(0.5)).expect("constructed state is valid")
}

/// Unit vector drawn uniformly from the sphere.
pub fn pure_vector(dim: usize, rng: &mut impl Rng) -> CVector {
    let mut v: CVector = (0..dim).map(|_| gaussian(rng)).collect();
    let n = crate::linalg::norm(&v);
    if n == 0.0 {
        v = vec![ZERO; dim];
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    v.iter_mut().for_each(|x| *x /= n);
    v
}

use num_complex::Complex64;

use super::matrix::{basis_deviation, CVector, ComplexMatrix, ZERO};
use super::operator::HermitianOperator;
use crate::error::{Error, Result};

/// Residual bound for accepting a caller-supplied vector as an eigenvector.
pub const EIGENVECTOR_TOL: f64 = 1e-8;
/// Deviation from the identity tolerated when a basis must resolve it.
pub const BASIS_TOL: f64 = 1e-8;

/// One eigenvalue of an operator, taken with its whole eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub eigenvalue: f64,
    pub projector: ComplexMatrix,
    pub eigenvectors: Vec<CVector>,
}

impl Cluster {
    fn from_vectors(eigenvalue: f64, eigenvectors: Vec<CVector>) -> Self {
        let dim = eigenvectors[0].len();
        let mut projector = ComplexMatrix::zeros(dim);
        for v in &eigenvectors {
            projector = &projector + &ComplexMatrix::projector(v);
        }
        Self {
            eigenvalue,
            projector,
            eigenvectors,
        }
    }

    pub fn multiplicity(&self) -> usize {
        self.eigenvectors.len()
    }
}

/// Eigenvalues grouped into degenerate clusters, ordered by ascending eigenvalue.
///
/// The eigenvectors inside a cluster are one particular orthonormal choice;
/// everything derived from `projector` is independent of that choice.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    dim: usize,
    clusters: Vec<Cluster>,
    cluster_tol: f64,
}

impl SpectralDecomposition {
    /// Decomposes `op`, merging consecutive sorted eigenvalues whose gap is at
    /// most `cluster_tol` (single linkage).
    pub fn new(op: &HermitianOperator, cluster_tol: f64) -> Result<Self> {
        let e = op.eigh()?;
        let groups = single_linkage(&e.eigenvalues, cluster_tol);
        let mut vectors = e.eigenvectors.into_iter();
        let clusters = groups
            .into_iter()
            .map(|(value, size)| {
                Cluster::from_vectors(value, vectors.by_ref().take(size).collect())
            })
            .collect();
        Ok(Self {
            dim: op.dim(),
            clusters,
            cluster_tol,
        })
    }

    /// Builds the decomposition of `op` from a caller-chosen orthonormal eigenbasis.
    ///
    /// Each vector must satisfy `||A v - <v|A|v> v|| <= 1e-8 max(1, ||A||_F)`.
    pub fn from_eigenbasis(
        op: &HermitianOperator,
        basis: &[CVector],
        cluster_tol: f64,
    ) -> Result<Self> {
        let dim = op.dim();
        for v in basis {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        let deviation = basis_deviation(basis, dim);
        if deviation > BASIS_TOL {
            return Err(Error::IncompleteBasis { deviation });
        }
        let scale = op.frobenius_norm().max(1.0);
        let mut pairs = Vec::with_capacity(dim);
        for (index, v) in basis.iter().enumerate() {
            let lambda = op.expectation(v);
            let av = op.matrix().mul_vec(v);
            let residual = av
                .iter()
                .zip(v)
                .map(|(x, y)| (x - y * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if residual > EIGENVECTOR_TOL * scale {
                return Err(Error::BasisNotEigen { index, residual });
            }
            pairs.push((lambda, v.clone()));
        }
        // Stable sort keeps the caller's order inside each cluster.
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let groups = single_linkage(&values, cluster_tol);
        let mut vectors = pairs.into_iter().map(|p| p.1);
        let clusters = groups
            .into_iter()
            .map(|(value, size)| {
                Cluster::from_vectors(value, vectors.by_ref().take(size).collect())
            })
            .collect();
        Ok(Self {
            dim,
            clusters,
            cluster_tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn is_degenerate(&self) -> bool {
        self.clusters.iter().any(|c| c.multiplicity() > 1)
    }

    /// All eigenvectors, cluster by cluster.
    pub fn basis(&self) -> Vec<CVector> {
        self.clusters
            .iter()
            .flat_map(|c| c.eigenvectors.iter().cloned())
            .collect()
    }

    /// `sum_i lambda_i P_i`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for c in &self.clusters {
            m = &m + &c.projector.scale_real(c.eigenvalue);
        }
        m
    }

    /// Replaces the eigenvectors of `cluster` by `v'_j = sum_i u_ij v_i`.
    ///
    /// The projector is rebuilt from the new vectors, so it only changes by
    /// rounding when `unitary` is unitary.
    pub fn rebase_cluster(&self, cluster: usize, unitary: &ComplexMatrix) -> Result<Self> {
        let c = &self.clusters[cluster];
        let d = c.multiplicity();
        if unitary.dim() != d {
            return Err(Error::BlockMismatch {
                cluster,
                dim: d,
                found: unitary.dim(),
            });
        }
        let new_vectors: Vec<CVector> = (0..d)
            .map(|j| {
                let mut v = vec![ZERO; self.dim];
                for (i, old) in c.eigenvectors.iter().enumerate() {
                    let coeff = unitary[(i, j)];
                    for (x, y) in v.iter_mut().zip(old) {
                        *x += coeff * y;
                    }
                }
                v
            })
            .collect();
        let mut out = self.clone();
        out.clusters[cluster] = Cluster::from_vectors(c.eigenvalue, new_vectors);
        Ok(out)
    }

    /// Checks that every stored vector is an eigenvector of `op` with its
    /// cluster's eigenvalue and that together they form a complete orthonormal basis.
    pub fn verify_eigenbasis_of(&self, op: &HermitianOperator) -> Result<()> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: op.dim(),
            });
        }
        let basis = self.basis();
        let deviation = basis_deviation(&basis, self.dim);
        if deviation > BASIS_TOL {
            return Err(Error::IncompleteBasis { deviation });
        }
        let scale = op.frobenius_norm().max(1.0);
        let mut index = 0;
        for c in &self.clusters {
            for v in &c.eigenvectors {
                let av = op.matrix().mul_vec(v);
                let residual = av
                    .iter()
                    .zip(v)
                    .map(|(x, y)| (x - y * c.eigenvalue).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if residual > EIGENVECTOR_TOL * scale {
                    return Err(Error::BasisNotEigen { index, residual });
                }
                index += 1;
            }
        }
        Ok(())
    }

    /// Index of the first cluster with multiplicity exactly two.
    pub fn first_two_dim_cluster(&self) -> Option<usize> {
        self.clusters.iter().position(|c| c.multiplicity() == 2)
    }
}

/// `(mean value, size)` for each run of sorted values with consecutive gaps `<= tol`.
fn single_linkage(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut groups: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            let run = &sorted[start..i];
            groups.push((run.iter().sum::<f64>() / run.len() as f64, run.len()));
            start = i;
        }
    }
    groups
}

/// Projection map `B -> sum_i P_i B P_i`.
pub fn pinch(decomp: &SpectralDecomposition, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    b.check_dim(decomp.dim())?;
    let mut out = ComplexMatrix::zeros(decomp.dim());
    for c in decomp.clusters() {
        out = &out + &(&(&c.projector * b) * &c.projector);
    }
    Ok(out)
}

/// Rank-one projection map `B -> sum_k |psi_k><psi_k| B |psi_k><psi_k|`,
/// i.e. the diagonal part of `B` in the basis `{psi_k}`.
pub fn rank1_pinch(basis: &[CVector], b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = b.dim();
    let deviation = basis_deviation(basis, dim);
    if deviation > BASIS_TOL {
        return Err(Error::IncompleteBasis { deviation });
    }
    let mut out = ComplexMatrix::zeros(dim);
    for v in basis {
        let diag: Complex64 = b.sandwich(v, v);
        out = &out + &ComplexMatrix::projector(v).scale(diag);
    }
    Ok(out)
}

//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so the
//! accumulated transform stays unitary and the diagonal stays real.

use num_complex::Complex64;

use super::matrix::{CVector, ComplexMatrix, ZERO};
use super::operator::HermitianOperator;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVector>,
}

pub fn eigh(op: &HermitianOperator) -> Result<Eigh> {
    let mut a = op.matrix().clone();
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();
    let target = 4.0 * n as f64 * f64::EPSILON * norm;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target || off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();
    Ok(Eigh {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with `a <- G^dag a G`, `v <- v G`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let r = b.norm();
    if r < f64::MIN_POSITIVE {
        return;
    }
    let phase = b / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase.conj() * -s;
    let g_qq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;

        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{basis_deviation, basis_vector, kron_vec, norm};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn residual(op: &HermitianOperator, e: &Eigh) -> f64 {
        e.eigenvalues
            .iter()
            .zip(&e.eigenvectors)
            .map(|(&l, v)| {
                let av = op.matrix().mul_vec(v);
                let r: Vec<_> = av.iter().zip(v).map(|(x, y)| x - y * l).collect();
                norm(&r)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_spectrum() {
        let op = HermitianOperator::new(ComplexMatrix::identity(4)).unwrap();
        let e = eigh(&op).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 4]);
        assert!(basis_deviation(&e.eigenvectors, 4) < 1e-12);
    }

    #[test]
    fn diagonal_is_sorted_with_permuted_basis() {
        let op = HermitianOperator::from_real_diagonal(&[7.0, 1.0, 5.0, 3.0]).unwrap();
        let e = eigh(&op).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 3.0, 5.0, 7.0]);
        for (v, k) in e.eigenvectors.iter().zip([1usize, 3, 2, 0]) {
            assert_eq!(*v, basis_vector(4, k));
        }
    }

    #[test]
    fn rotated_two_qubit_hamiltonian() {
        // H = |00><00| + 3|01><01| + 5|10><10| + 7|11><11| with |1> = (|+>+|->)/sqrt2,
        // |0> = (|+>-|->)/sqrt2, written in the |+->,|-> product basis.
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let ket1 = vec![s, s];
        let ket0 = vec![s, -s];
        let states = [
            kron_vec(&ket0, &ket0),
            kron_vec(&ket0, &ket1),
            kron_vec(&ket1, &ket0),
            kron_vec(&ket1, &ket1),
        ];
        let op = HermitianOperator::from_spectrum(&[1.0, 3.0, 5.0, 7.0], &states).unwrap();
        // Not diagonal in the computational basis.
        assert!(op.matrix()[(0, 1)].norm() > 0.1);
        let e = eigh(&op).unwrap();
        for (got, want) in e.eigenvalues.iter().zip([1.0, 3.0, 5.0, 7.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        for (v, w) in e.eigenvectors.iter().zip(&states) {
            let overlap = crate::linalg::matrix::inner(v, w).norm();
            assert!((overlap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_phases_converge() {
        let i = Complex64::new(0.0, 1.0);
        let m = ComplexMatrix::from_rows(vec![
            vec![Complex64::new(2.0, 0.0), i, Complex64::new(0.5, 0.5)],
            vec![-i, Complex64::new(-1.0, 0.0), Complex64::new(0.0, -2.0)],
            vec![
                Complex64::new(0.5, -0.5),
                Complex64::new(0.0, 2.0),
                Complex64::new(0.3, 0.0),
            ],
        ])
        .unwrap();
        let op = HermitianOperator::new(m).unwrap();
        let e = eigh(&op).unwrap();
        assert!(residual(&op, &e) <= 1e-10 * op.frobenius_norm());
        assert!(basis_deviation(&e.eigenvectors, 3) < 1e-10);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let tr: f64 = e.eigenvalues.iter().sum();
        assert!((tr - 1.3).abs() < 1e-12);
    }
}

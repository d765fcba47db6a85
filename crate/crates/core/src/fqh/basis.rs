use num_complex::Complex64;

use crate::linalg::{CVector, ComplexMatrix};

/// Coefficients of the Bloch-parameterised pair in the reference basis `(|+>, |->)`:
///
/// `|psi+> =  e^{i phi} cos(theta/2) |+> + sin(theta/2) |->`
/// `|psi-> = -e^{-i phi} cos(theta/2) |-> + sin(theta/2) |+>`
///
/// Column 0 holds `|psi+>`, column 1 holds `|psi->`.
pub fn bloch_unitary(theta: f64, phi: f64) -> ComplexMatrix {
    let c = (theta / 2.0).cos();
    let s = Complex64::new((theta / 2.0).sin(), 0.0);
    let e = Complex64::from_polar(1.0, phi);
    let mut u = ComplexMatrix::zeros(2);
    u[(0, 0)] = e * c;
    u[(1, 0)] = s;
    u[(0, 1)] = s;
    u[(1, 1)] = -e.conj() * c;
    u
}

/// `(|psi+>, |psi->)` built from explicit reference vectors `|+>`, `|->`.
pub fn bloch_pair(
    theta: f64,
    phi: f64,
    plus: &[Complex64],
    minus: &[Complex64],
) -> (CVector, CVector) {
    let u = bloch_unitary(theta, phi);
    let combine = |j: usize| -> CVector {
        plus.iter()
            .zip(minus)
            .map(|(p, m)| u[(0, j)] * p + u[(1, j)] * m)
            .collect()
    };
    (combine(0), combine(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_deviation, basis_vector};
    use std::f64::consts::PI;

    #[test]
    fn pair_is_orthonormal_for_any_angles() {
        let plus = basis_vector(2, 0);
        let minus = basis_vector(2, 1);
        for &(t, p) in &[(0.0, 0.0), (0.3, 1.7), (PI / 2.0, PI), (2.9, 5.5)] {
            let (a, b) = bloch_pair(t, p, &plus, &minus);
            assert!(basis_deviation(&[a, b], 2) < 1e-15);
        }
    }

    #[test]
    fn equator_at_zero_phase() {
        let (a, b) = bloch_pair(PI / 2.0, 0.0, &basis_vector(2, 0), &basis_vector(2, 1));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[0].re - h).abs() < 1e-15 && (a[1].re - h).abs() < 1e-15);
        assert!((b[0].re - h).abs() < 1e-15 && (b[1].re + h).abs() < 1e-15);
    }

    #[test]
    fn pole_is_reference_basis_up_to_phase() {
        let (a, b) = bloch_pair(0.0, 0.0, &basis_vector(2, 0), &basis_vector(2, 1));
        assert_eq!(a, basis_vector(2, 0));
        assert!((b[1].re + 1.0).abs() < 1e-15 && b[0].norm() < 1e-15);
    }
}

use serde::{Deserialize, Serialize};

use super::{
    eigenstate_distribution, moments_enumerated, partial_cg_distribution, variance, HeatProblem,
};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, Tolerances};

/// Wigner-Yanase-Dyson skew information `tr[H^2 rho] - tr[H rho^{1/2} H rho^{1/2}]`.
///
/// `rho_like` only needs to be positive semidefinite, so rank-one projectors
/// and normalised spectral projectors are accepted directly. Evaluated in the
/// eigenbasis of `rho_like` as `1/2 sum_ij (sqrt(l_i) - sqrt(l_j))^2 |H_ij|^2`,
/// which is non-negative term by term.
pub fn skew_information(
    rho_like: &HermitianOperator,
    hamiltonian: &HermitianOperator,
) -> Result<f64> {
    rho_like.matrix().check_dim(hamiltonian.dim())?;
    let psd_tol = Tolerances::default().psd;
    let e = rho_like.eigh()?;
    if e.eigenvalues[0] < -psd_tol {
        return Err(Error::NotPsd {
            min_eigenvalue: e.eigenvalues[0],
            tol: psd_tol,
        });
    }
    let noise = 4.0 * rho_like.dim() as f64 * f64::EPSILON * rho_like.frobenius_norm();
    let roots: Vec<f64> = e
        .eigenvalues
        .iter()
        .map(|&l| if l > noise { l.sqrt() } else { 0.0 })
        .collect();
    let h = hamiltonian.matrix();
    let mut total = 0.0;
    for (i, vi) in e.eigenvectors.iter().enumerate() {
        for (j, vj) in e.eigenvectors.iter().enumerate().skip(i + 1) {
            let gap = roots[i] - roots[j];
            total += gap * gap * h.sandwich(vi, vj).norm_sqr();
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceIdentities {
    pub var_q: f64,
    pub var_s: f64,
    /// `sum_{m,mu} lambda_m I_{|psi_{m,mu}>}(H)`; equals `var_q`.
    pub skew_bound_eigenstate: f64,
    /// `sum_m q_m I_{P_m / d_m}(H)`; bounds `var_s` from above and `var_q` from below.
    pub skew_bound_partial: f64,
    /// The bound on `var_s` is attained: the state is non-degenerate or commutes with `H`.
    pub cauchy_schwarz_tight: bool,
}

pub fn variance_identities(problem: &HeatProblem) -> Result<VarianceIdentities> {
    let h = problem.hamiltonian();
    let var_q = variance(&moments_enumerated(&eigenstate_distribution(problem), 2)?);
    let var_s = variance(&moments_enumerated(&partial_cg_distribution(problem), 2)?);

    let mut skew_bound_eigenstate = 0.0;
    let mut skew_bound_partial = 0.0;
    for (m, c) in problem.state().clusters().iter().enumerate() {
        let weight = problem.weight(m);
        for psi in &c.eigenvectors {
            let pure = HermitianOperator::new(ComplexMatrix::projector(psi))?;
            skew_bound_eigenstate += weight * skew_information(&pure, h)?;
        }
        let d = c.multiplicity() as f64;
        let normalised = HermitianOperator::new(c.projector.scale_real(1.0 / d))?;
        skew_bound_partial += weight * d * skew_information(&normalised, h)?;
    }

    Ok(VarianceIdentities {
        var_q,
        var_s,
        skew_bound_eigenstate,
        skew_bound_partial,
        cauchy_schwarz_tight: !problem.state().is_degenerate() || problem.is_commuting(),
    })
}

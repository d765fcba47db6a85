use super::distribution::partial_terms;
use super::{HeatDistribution, HeatProblem};
use crate::error::{Error, Result};
use crate::linalg::{rank1_pinch, ComplexMatrix};

/// Highest moment order supported by the closed-form routes.
pub const MAX_ORDER: usize = 16;

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    Ok(())
}

/// Exact `C(k, i)` for `k <= MAX_ORDER`.
pub fn binomial(k: usize, i: usize) -> u64 {
    if i > k {
        return 0;
    }
    let i = i.min(k - i) as u64;
    let k = k as u64;
    // Each partial product is itself a binomial coefficient, so the division is exact.
    (0..i).fold(1u64, |acc, j| acc * (k - j) / (j + 1))
}

/// `moments[k - 1] = sum p * heat^k` for `k = 1..=order`.
pub fn moments_enumerated(dist: &HeatDistribution, order: usize) -> Result<Vec<f64>> {
    check_order(order)?;
    let mut out = vec![0.0; order];
    for e in &dist.entries {
        let mut power = e.probability;
        for slot in out.iter_mut() {
            power *= e.heat;
            *slot += power;
        }
    }
    Ok(out)
}

/// `moments[k - 1] = sum_i C(k, i) (-1)^i tr[H^(k-i) D_psi(H)^i rho]`, where
/// `D_psi` is the rank-one projection map onto the chosen eigenbasis of `rho`.
pub fn moments_trace_formula_eigenstate(problem: &HeatProblem, order: usize) -> Result<Vec<f64>> {
    check_order(order)?;
    let h = problem.hamiltonian().matrix();
    let dephased = rank1_pinch(&problem.state().basis(), h)?;
    let mut h_powers = vec![ComplexMatrix::identity(problem.dim())];
    let mut d_powers_rho = vec![problem.rho().matrix().clone()];
    for i in 1..=order {
        h_powers.push(&h_powers[i - 1] * h);
        d_powers_rho.push(&dephased * &d_powers_rho[i - 1]);
    }
    Ok((1..=order)
        .map(|k| {
            (0..=k)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binomial(k, i) as f64
                        * h_powers[k - i].trace_product(&d_powers_rho[i]).re
                })
                .sum()
        })
        .collect())
}

/// `moments[k - 1] = tr[(H - D_psi(H))^k rho]`.
///
/// Agrees with [`moments_trace_formula_eigenstate`] for `k <= 2`, and for all
/// `k` when `H` commutes with `D_psi(H)`; otherwise the binomial expansion
/// does not factor and the two differ from order 3 on.
pub fn moments_compact_eigenstate(problem: &HeatProblem, order: usize) -> Result<Vec<f64>> {
    check_order(order)?;
    let h = problem.hamiltonian().matrix();
    let dephased = rank1_pinch(&problem.state().basis(), h)?;
    let shifted = h - &dephased;
    let mut power = ComplexMatrix::identity(problem.dim());
    Ok((1..=order)
        .map(|_| {
            power = &power * &shifted;
            power.trace_product(problem.rho().matrix()).re
        })
        .collect())
}

/// `sum_{m,n} lambda_m tr[Pi_n P_m] sum_i C(k,i) (-1)^i e_n^{k-i} (tr[Pi_n P_m H P_m] / tr[Pi_n P_m])^i`,
/// skipping pairs with `tr[Pi_n P_m] <= PROB_FLOOR`.
pub fn moments_trace_formula_partial(problem: &HeatProblem, order: usize) -> Result<Vec<f64>> {
    check_order(order)?;
    let mut out = vec![0.0; order];
    for t in partial_terms(problem) {
        let weight = problem.weight(t.m) * t.overlap;
        let ratio = t.projected_energy / t.overlap;
        for (slot, k) in out.iter_mut().zip(1..=order) {
            let expansion: f64 = (0..=k)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binomial(k, i) as f64
                        * t.energy.powi((k - i) as i32)
                        * ratio.powi(i as i32)
                })
                .sum();
            *slot += weight * expansion;
        }
    }
    Ok(out)
}

/// `<X^2> - <X>^2` from a moment list starting at order 1.
pub fn variance(moments: &[f64]) -> f64 {
    moments[1] - moments[0] * moments[0]
}

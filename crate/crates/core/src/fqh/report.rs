use serde::{Deserialize, Serialize};

use super::{
    eigenstate_distribution, full_cg_distribution, full_cg_numeric_heats, moments_enumerated,
    moments_trace_formula_eigenstate, moments_trace_formula_partial, partial_cg_distribution,
    variance, variance_identities, HeatDistribution, HeatProblem,
};
use crate::error::{Error, Result};
use crate::instruments::PROB_FLOOR;

/// First moments must vanish, and commuting inputs must give vanishing moments, to this bound.
pub const MOMENT_ZERO_TOL: f64 = 1e-9;
/// Slack allowed in `var(full) <= var(partial) <= var(eigenstate)` and in the skew bounds.
pub const ORDERING_SLACK: f64 = 1e-9;
/// Agreement of `var(eigenstate)` with its skew-information sum.
pub const SKEW_IDENTITY_TOL: f64 = 1e-8;
/// Relative agreement of enumerated and closed-form moments, scaled by `1 + ||H||_F^K`.
pub const MOMENT_AGREEMENT_TOL: f64 = 1e-8;
/// Bound on the numerically evaluated fully coarse-grained heat, scaled by `1 + ||H||_F`.
pub const FULL_CG_NUMERIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerLevel<T> {
    pub eigenstate: T,
    pub partial_cg: T,
    pub full_cg: T,
}

impl<T> PerLevel<T> {
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        [&self.eigenstate, &self.partial_cg, &self.full_cg].into_iter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FqhReport {
    pub dim: usize,
    pub order: usize,
    pub basis_tag: String,
    pub distributions: PerLevel<HeatDistribution>,
    /// `moments.x[k - 1]` is the order-`k` moment by enumerating trajectories.
    pub moments: PerLevel<Vec<f64>>,
    /// The same moments through the closed-form trace formulas; for the fully
    /// coarse-grained level, through the numerically evaluated conditional energy change.
    pub trace_formula_moments: PerLevel<Vec<f64>>,
    pub max_moment_discrepancy: f64,
    pub variances: PerLevel<f64>,
    pub skew_bound_eigenstate: f64,
    pub skew_bound_partial: f64,
    pub cauchy_schwarz_tight: bool,
    pub ordering_ok: bool,
    pub commuting_case: bool,
    pub full_cg_numeric_max_heat: f64,
    /// Some outcome probability fell in `(0, PROB_FLOOR]` and its heat was set to 0 or skipped.
    pub prob_floor_triggered: bool,
    /// Human-readable descriptions of every failed invariant check.
    pub violations: Vec<String>,
}

impl FqhReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn analyze(problem: &HeatProblem, order: usize) -> Result<FqhReport> {
    if order < 2 {
        return Err(Error::InvalidOrder(order));
    }
    let distributions = PerLevel {
        eigenstate: eigenstate_distribution(problem),
        partial_cg: partial_cg_distribution(problem),
        full_cg: full_cg_distribution(problem),
    };
    let moments = PerLevel {
        eigenstate: moments_enumerated(&distributions.eigenstate, order)?,
        partial_cg: moments_enumerated(&distributions.partial_cg, order)?,
        full_cg: moments_enumerated(&distributions.full_cg, order)?,
    };

    let numeric_full = full_cg_numeric_heats(problem)?;
    let full_cg_numeric_max_heat = numeric_full.iter().map(|t| t.2.abs()).fold(0.0, f64::max);
    let mut full_numeric_moments = vec![0.0; order];
    for (_, p, heat) in &numeric_full {
        let mut power = *p;
        for slot in full_numeric_moments.iter_mut() {
            power *= heat;
            *slot += power;
        }
    }
    let trace_formula_moments = PerLevel {
        eigenstate: moments_trace_formula_eigenstate(problem, order)?,
        partial_cg: moments_trace_formula_partial(problem, order)?,
        full_cg: full_numeric_moments,
    };

    let max_moment_discrepancy = moments
        .iter()
        .zip(trace_formula_moments.iter())
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);

    let variances = PerLevel {
        eigenstate: variance(&moments.eigenstate),
        partial_cg: variance(&moments.partial_cg),
        full_cg: variance(&moments.full_cg),
    };
    let ids = variance_identities(problem)?;
    let ordering_ok = variances.full_cg <= variances.partial_cg + ORDERING_SLACK
        && variances.partial_cg <= variances.eigenstate + ORDERING_SLACK;
    let commuting_case = problem.is_commuting();

    let prob_floor_triggered = numeric_full
        .iter()
        .map(|t| t.1)
        .chain(
            distributions
                .eigenstate
                .entries
                .iter()
                .map(|e| e.probability),
        )
        .any(|p| p > 0.0 && p <= PROB_FLOOR)
        || problem.state().clusters().iter().any(|sc| {
            problem.energy().clusters().iter().any(|ec| {
                let t = ec.projector.trace_product(&sc.projector).re;
                t > 0.0 && t <= PROB_FLOOR
            })
        });

    let h_norm = problem.hamiltonian().frobenius_norm();
    let mut violations = Vec::new();
    // A degenerate state commuting with H still has eigenbases that do not
    // diagonalise H; only the eigenstate heat depends on that choice.
    let eigenstate_must_vanish = problem.basis_diagonalises_hamiltonian();
    for (name, m) in ["eigenstate", "partial_cg", "full_cg"]
        .iter()
        .zip(moments.iter())
    {
        if m[0].abs() > MOMENT_ZERO_TOL {
            violations.push(format!(
                "first moment of {name} heat is {:e}, expected 0",
                m[0]
            ));
        }
        if commuting_case && (*name != "eigenstate" || eigenstate_must_vanish) {
            if let Some(k) = m.iter().position(|x| x.abs() > MOMENT_ZERO_TOL) {
                violations.push(format!(
                    "commuting inputs but order-{} moment of {name} heat is {:e}",
                    k + 1,
                    m[k]
                ));
            }
        }
    }
    if !ordering_ok {
        violations.push(format!(
            "variance ordering violated: full {:e}, partial {:e}, eigenstate {:e}",
            variances.full_cg, variances.partial_cg, variances.eigenstate
        ));
    }
    if (variances.eigenstate - ids.skew_bound_eigenstate).abs() > SKEW_IDENTITY_TOL {
        violations.push(format!(
            "eigenstate variance {:e} differs from skew-information sum {:e}",
            variances.eigenstate, ids.skew_bound_eigenstate
        ));
    }
    if variances.partial_cg > ids.skew_bound_partial + ORDERING_SLACK {
        violations.push(format!(
            "partial variance {:e} exceeds its skew-information bound {:e}",
            variances.partial_cg, ids.skew_bound_partial
        ));
    }
    if ids.skew_bound_partial > variances.eigenstate + ORDERING_SLACK {
        violations.push(format!(
            "partial skew bound {:e} exceeds eigenstate variance {:e}",
            ids.skew_bound_partial, variances.eigenstate
        ));
    }
    let agreement = MOMENT_AGREEMENT_TOL * (1.0 + h_norm.powi(order as i32));
    if max_moment_discrepancy > agreement {
        violations.push(format!(
            "enumerated and closed-form moments differ by {max_moment_discrepancy:e} (allowed {agreement:e})"
        ));
    }
    let numeric_bound = FULL_CG_NUMERIC_TOL * (1.0 + h_norm);
    if full_cg_numeric_max_heat > numeric_bound {
        violations.push(format!(
            "numerical fully coarse-grained heat reaches {full_cg_numeric_max_heat:e} (allowed {numeric_bound:e})"
        ));
    }

    Ok(FqhReport {
        dim: problem.dim(),
        order,
        basis_tag: problem.basis_tag().to_string(),
        distributions,
        moments,
        trace_formula_moments,
        max_moment_discrepancy,
        variances,
        skew_bound_eigenstate: ids.skew_bound_eigenstate,
        skew_bound_partial: ids.skew_bound_partial,
        cauchy_schwarz_tight: ids.cauchy_schwarz_tight,
        ordering_ok,
        commuting_case,
        full_cg_numeric_max_heat,
        prob_floor_triggered,
        violations,
    })
}

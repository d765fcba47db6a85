use super::{HeatDistribution, HeatEntry, HeatProblem, Level};
use crate::error::Result;
use crate::instruments::{energy_changes, projective_instrument, Label, PROB_FLOOR};
use crate::linalg::{inner, ComplexMatrix};

/// One entry per `((m, mu), (n, nu))`: probability `lambda_m |<phi_{n,nu}|psi_{m,mu}>|^2`
/// and heat `e_n - <psi_{m,mu}|H|psi_{m,mu}>`.
pub fn eigenstate_distribution(problem: &HeatProblem) -> HeatDistribution {
    let h = problem.hamiltonian();
    let mut entries = Vec::with_capacity(problem.dim() * problem.dim());
    for (m, sc) in problem.state().clusters().iter().enumerate() {
        let weight = problem.weight(m);
        for (mu, psi) in sc.eigenvectors.iter().enumerate() {
            let initial_energy = h.expectation(psi);
            for (n, ec) in problem.energy().clusters().iter().enumerate() {
                for (nu, phi) in ec.eigenvectors.iter().enumerate() {
                    entries.push(HeatEntry {
                        label: Label::seq(Label::Vector(m, mu), Label::Vector(n, nu)),
                        probability: weight * inner(phi, psi).norm_sqr(),
                        heat: ec.eigenvalue - initial_energy,
                    });
                }
            }
        }
    }
    HeatDistribution {
        level: Level::Eigenstate,
        entries,
        basis_tag: Some(problem.basis_tag().to_string()),
    }
}

/// One entry per `(m, n)` with `tr[Pi_n P_m] > PROB_FLOOR`: probability
/// `lambda_m tr[Pi_n P_m]` and heat `e_n - tr[Pi_n P_m H P_m] / tr[Pi_n P_m]`.
pub fn partial_cg_distribution(problem: &HeatProblem) -> HeatDistribution {
    let entries = partial_terms(problem)
        .map(|t| HeatEntry {
            label: Label::seq(Label::Index(t.m), Label::Index(t.n)),
            probability: problem.weight(t.m) * t.overlap,
            heat: t.energy - t.projected_energy / t.overlap,
        })
        .collect();
    HeatDistribution {
        level: Level::PartialCg,
        entries,
        basis_tag: None,
    }
}

/// One entry per energy eigenspace: probability `tr[Pi_n rho]`, heat 0.
pub fn full_cg_distribution(problem: &HeatProblem) -> HeatDistribution {
    let entries = problem
        .energy()
        .clusters()
        .iter()
        .enumerate()
        .map(|(n, c)| HeatEntry {
            label: Label::Index(n),
            probability: c.projector.trace_product(problem.rho().matrix()).re,
            heat: 0.0,
        })
        .collect();
    HeatDistribution {
        level: Level::FullCg,
        entries,
        basis_tag: None,
    }
}

/// The fully coarse-grained heat evaluated numerically as the conditional
/// energy change of the energy measurement, `(label, probability, heat)`.
pub fn full_cg_numeric_heats(problem: &HeatProblem) -> Result<Vec<(Label, f64, f64)>> {
    energy_changes(
        &projective_instrument(problem.energy()),
        problem.rho(),
        problem.hamiltonian(),
    )
}

/// Both sides of `tr[Pi_n P_m H P_m]^2 / tr[Pi_n P_m] <= tr[Pi_n (P_m H P_m)^2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchySchwarzTerm {
    pub label: Label,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn cauchy_schwarz_terms(problem: &HeatProblem) -> Vec<CauchySchwarzTerm> {
    partial_terms(problem)
        .map(|t| CauchySchwarzTerm {
            label: Label::seq(Label::Index(t.m), Label::Index(t.n)),
            lhs: t.projected_energy * t.projected_energy / t.overlap,
            rhs: t.projected_energy_sq,
        })
        .collect()
}

pub(crate) struct PartialTerm {
    pub m: usize,
    pub n: usize,
    /// `e_n`
    pub energy: f64,
    /// `tr[Pi_n P_m]`
    pub overlap: f64,
    /// `tr[Pi_n P_m H P_m]`
    pub projected_energy: f64,
    /// `tr[Pi_n (P_m H P_m)^2]`
    pub projected_energy_sq: f64,
}

/// Projector traces for every `(m, n)` with `tr[Pi_n P_m] > PROB_FLOOR`.
pub(crate) fn partial_terms(problem: &HeatProblem) -> impl Iterator<Item = PartialTerm> + '_ {
    let h = problem.hamiltonian().matrix();
    let compressed: Vec<ComplexMatrix> = problem
        .state()
        .clusters()
        .iter()
        .map(|c| &(&c.projector * h) * &c.projector)
        .collect();
    problem
        .state()
        .clusters()
        .iter()
        .enumerate()
        .flat_map(move |(m, sc)| {
            let phq = compressed[m].clone();
            let phq_sq = &phq * &phq;
            problem
                .energy()
                .clusters()
                .iter()
                .enumerate()
                .filter_map(move |(n, ec)| {
                    let overlap = ec.projector.trace_product(&sc.projector).re;
                    (overlap > PROB_FLOOR).then(|| PartialTerm {
                        m,
                        n,
                        energy: ec.eigenvalue,
                        overlap,
                        projected_energy: ec.projector.trace_product(&phq).re,
                        projected_energy_sq: ec.projector.trace_product(&phq_sq).re,
                    })
                })
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instruments::{
        apply, conditional_energy_change, eigenvector_instrument, sequential,
    };
    use crate::linalg::{CVector, DensityState, HermitianOperator};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn x_basis() -> Vec<CVector> {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        vec![vec![s, s], vec![s, -s]]
    }

    fn mixed_z_problem() -> HeatProblem {
        let rho = DensityState::maximally_mixed(2).unwrap();
        let h = HermitianOperator::from_real_diagonal(&[1.0, -1.0]).unwrap();
        HeatProblem::new(rho, h)
            .unwrap()
            .with_eigenbasis(&x_basis(), "x")
            .unwrap()
    }

    #[test]
    fn mixed_state_x_basis_trajectories() {
        // Hand enumeration: |+-x> have zero energy, so every trajectory has
        // heat +-1 with probability 1/2 * 1/2.
        let d = eigenstate_distribution(&mixed_z_problem());
        assert_eq!(d.entries.len(), 4);
        for e in &d.entries {
            assert!((e.probability - 0.25).abs() < 1e-15);
            assert!((e.heat.abs() - 1.0).abs() < 1e-15);
        }
        let plus: f64 = d
            .entries
            .iter()
            .filter(|e| e.heat > 0.0)
            .map(|e| e.probability)
            .sum();
        assert!((plus - 0.5).abs() < 1e-15);
        assert_eq!(d.basis_tag.as_deref(), Some("x"));
    }

    #[test]
    fn mixed_state_partial_heat_vanishes() {
        let d = partial_cg_distribution(&mixed_z_problem());
        assert_eq!(d.entries.len(), 2);
        for e in &d.entries {
            assert!((e.probability - 0.5).abs() < 1e-15);
            assert!(e.heat.abs() < 1e-15);
        }
    }

    #[test]
    fn energy_eigenstate_has_single_trajectory() {
        let rho =
            DensityState::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let h = HermitianOperator::from_real_diagonal(&[1.0, -1.0]).unwrap();
        let p = HeatProblem::new(rho, h).unwrap();
        let d = eigenstate_distribution(&p);
        let nonzero: Vec<_> = d.entries.iter().filter(|e| e.probability > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((nonzero[0].probability - 1.0).abs() < 1e-15);
        assert_eq!(nonzero[0].heat, 0.0);
    }

    #[test]
    fn eigenstate_entries_match_sequential_instrument() {
        let v = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let w = vec![Complex64::new(0.0, 0.8), Complex64::new(0.6, 0.0)];
        let rho = HermitianOperator::from_spectrum(&[0.7, 0.3], &[v, w]).unwrap();
        let rho = DensityState::new(rho.matrix().clone()).unwrap();
        let h = HermitianOperator::from_real_diagonal(&[2.0, -0.5]).unwrap();
        let p = HeatProblem::new(rho, h).unwrap();
        let inst = sequential(
            &eigenvector_instrument(p.state()),
            &eigenvector_instrument(p.energy()),
        )
        .unwrap();
        let stats = apply(&inst, p.rho()).unwrap();
        for e in eigenstate_distribution(&p).entries {
            let s = stats.iter().find(|s| s.label == e.label).unwrap();
            assert!((s.probability - e.probability).abs() < 1e-14);
            if e.probability > PROB_FLOOR {
                let de =
                    conditional_energy_change(&inst, p.rho(), p.hamiltonian(), &e.label).unwrap();
                assert!(
                    (de - e.heat).abs() < 1e-12,
                    "{}: {de} vs {}",
                    e.label,
                    e.heat
                );
            }
        }
    }

    #[test]
    fn commuting_partial_heat_is_zero() {
        let rho = DensityState::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.25, 0.25])).unwrap();
        let h = HermitianOperator::from_real_diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let p = HeatProblem::new(rho, h).unwrap();
        for e in partial_cg_distribution(&p).entries {
            assert!(e.heat.abs() < 1e-14);
        }
    }

    #[test]
    fn full_cg_eigenstate_fixture() {
        let rho =
            DensityState::new(ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 1.0, 0.0])).unwrap();
        let h = HermitianOperator::from_real_diagonal(&[1.0, 3.0, 5.0, 7.0]).unwrap();
        let p = HeatProblem::new(rho, h).unwrap();
        let d = full_cg_distribution(&p);
        let hit: Vec<_> = d.entries.iter().filter(|e| e.probability > 0.5).collect();
        assert_eq!(hit.len(), 1);
        assert_eq!(
            p.energy().clusters()[match hit[0].label {
                Label::Index(n) => n,
                _ => unreachable!(),
            }]
            .eigenvalue,
            5.0
        );
        assert!(d.entries.iter().all(|e| e.heat == 0.0));
    }
}

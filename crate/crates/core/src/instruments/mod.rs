//! Measurement instruments in operator-sum form.
//!
//! An instrument is a family `{I_x}` of completely positive maps
//! `I_x(B) = sum_k K_k B K_k^dag`. Outcome `x` occurs with probability
//! `tr[I_x(rho)]` and leaves the state `I_x(rho) / tr[I_x(rho)]`.

mod label;

pub use label::{Label, ParseLabelError};

use crate::error::{Error, Result};
use crate::linalg::{
    basis_deviation, CVector, ComplexMatrix, DensityState, HermitianOperator,
    SpectralDecomposition, Tolerances, BASIS_TOL,
};

/// Outcomes with `tr[I_x(rho)]` at or below this are treated as impossible:
/// their energy change is 0 and they carry no post-measurement state.
pub const PROB_FLOOR: f64 = 1e-12;

const TRACE_NON_INCREASING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: Label,
    pub kraus: Vec<ComplexMatrix>,
}

impl Outcome {
    /// `I_x(B) = sum_k K_k B K_k^dag`
    pub fn map(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(b.dim());
        for k in &self.kraus {
            out = &out + &b.conjugate_by(k);
        }
        out
    }

    /// `tr[I_x(B)]`, computed as `tr[(sum_k K_k^dag K_k) B]`.
    pub fn trace_map(&self, b: &ComplexMatrix) -> f64 {
        self.kraus
            .iter()
            .map(|k| (&k.adjoint() * k).trace_product(b).re)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausInstrument {
    dim: usize,
    outcomes: Vec<Outcome>,
}

impl KrausInstrument {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        let dim = outcomes
            .first()
            .and_then(|o| o.kraus.first())
            .map(ComplexMatrix::dim)
            .ok_or(Error::EmptyInstrument)?;
        let mut effect_sum = ComplexMatrix::zeros(dim);
        for o in &outcomes {
            if o.kraus.is_empty() {
                return Err(Error::EmptyInstrument);
            }
            for k in &o.kraus {
                k.check_dim(dim)?;
                effect_sum = &effect_sum + &(&k.adjoint() * k);
            }
        }
        let effect_sum = HermitianOperator::with_tol(effect_sum, 1e-9)?;
        let largest = *effect_sum.eigh()?.eigenvalues.last().unwrap_or(&0.0);
        if largest > 1.0 + TRACE_NON_INCREASING_TOL {
            return Err(Error::NotTraceNonIncreasing {
                excess: largest - 1.0,
            });
        }
        Ok(Self { dim, outcomes })
    }

    /// Single outcome `Index(0)` with Kraus operator `1`.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            outcomes: vec![Outcome {
                label: Label::Index(0),
                kraus: vec![ComplexMatrix::identity(dim)],
            }],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.outcomes.iter().map(|o| &o.label)
    }

    pub fn outcome(&self, label: &Label) -> Result<&Outcome> {
        self.outcomes
            .iter()
            .find(|o| &o.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))
    }

    /// Largest deviation of `sum K^dag K` from the identity.
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.dim);
        for o in &self.outcomes {
            for k in &o.kraus {
                s = &s + &(&k.adjoint() * k);
            }
        }
        (&s - &ComplexMatrix::identity(self.dim)).max_abs()
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preservation_defect() <= TRACE_NON_INCREASING_TOL
    }

    /// Unselective post-measurement operator `sum_x I_x(B)`.
    pub fn unselective(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        b.check_dim(self.dim)?;
        let mut out = ComplexMatrix::zeros(self.dim);
        for o in &self.outcomes {
            out = &out + &o.map(b);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct OutcomeStatistics {
    pub label: Label,
    pub probability: f64,
    /// `None` when `probability <= PROB_FLOOR`.
    pub post_state: Option<DensityState>,
}

/// Probabilities and normalised conditional states for every outcome.
pub fn apply(inst: &KrausInstrument, rho: &DensityState) -> Result<Vec<OutcomeStatistics>> {
    rho.matrix().check_dim(inst.dim())?;
    inst.outcomes()
        .iter()
        .map(|o| {
            let unnormalised = o.map(rho.matrix());
            let probability = unnormalised.trace().re;
            let post_state = if probability > PROB_FLOOR {
                // Rounding in I_x(rho) is amplified by 1/p after normalisation.
                let tol = Tolerances {
                    trace: rho.trace_tol(),
                    psd: rho.psd_tol(),
                    ..Tolerances::default()
                }
                .scaled(1.0 / probability.min(1.0));
                Some(DensityState::with_tolerances(
                    unnormalised.scale_real(1.0 / probability),
                    &tol,
                )?)
            } else {
                None
            };
            Ok(OutcomeStatistics {
                label: o.label.clone(),
                probability,
                post_state,
            })
        })
        .collect()
}

/// Conditional increase in expected energy given outcome `label`:
///
/// `tr[H I_x(rho)] / p - tr[I_x(H rho + rho H)] / (2 p)`, `p = tr[I_x(rho)]`,
///
/// where the subtracted term is the real part of the weak value of `H`.
/// Returns exactly 0 when `p <= PROB_FLOOR`.
pub fn conditional_energy_change(
    inst: &KrausInstrument,
    rho: &DensityState,
    hamiltonian: &HermitianOperator,
    label: &Label,
) -> Result<f64> {
    rho.matrix().check_dim(inst.dim())?;
    hamiltonian.matrix().check_dim(inst.dim())?;
    let outcome = inst.outcome(label)?;
    Ok(energy_change_for(
        outcome,
        rho.matrix(),
        hamiltonian.matrix(),
    ))
}

/// `(label, probability, energy change)` for every outcome, in instrument order.
pub fn energy_changes(
    inst: &KrausInstrument,
    rho: &DensityState,
    hamiltonian: &HermitianOperator,
) -> Result<Vec<(Label, f64, f64)>> {
    rho.matrix().check_dim(inst.dim())?;
    hamiltonian.matrix().check_dim(inst.dim())?;
    Ok(inst
        .outcomes()
        .iter()
        .map(|o| {
            let p = o.trace_map(rho.matrix());
            (
                o.label.clone(),
                p,
                energy_change_for(o, rho.matrix(), hamiltonian.matrix()),
            )
        })
        .collect())
}

fn energy_change_for(outcome: &Outcome, rho: &ComplexMatrix, h: &ComplexMatrix) -> f64 {
    let post = outcome.map(rho);
    let p = post.trace().re;
    if p <= PROB_FLOOR {
        return 0.0;
    }
    let final_energy = h.trace_product(&post).re;
    let weak = 0.5 * outcome.trace_map(&rho.anticommutator(h));
    (final_energy - weak) / p
}

/// Measure with `first`, then with `second`. Outcome `(x, y)` has Kraus
/// operators `L_y K_x` for every pair of Kraus operators.
pub fn sequential(first: &KrausInstrument, second: &KrausInstrument) -> Result<KrausInstrument> {
    if first.dim() != second.dim() {
        return Err(Error::DimensionMismatch {
            expected: first.dim(),
            found: second.dim(),
        });
    }
    let mut outcomes = Vec::with_capacity(first.outcomes().len() * second.outcomes().len());
    for a in first.outcomes() {
        for b in second.outcomes() {
            let kraus = a
                .kraus
                .iter()
                .flat_map(|k| b.kraus.iter().map(move |l| l * k))
                .collect();
            outcomes.push(Outcome {
                label: Label::seq(a.label.clone(), b.label.clone()),
                kraus,
            });
        }
    }
    Ok(KrausInstrument {
        dim: first.dim(),
        outcomes,
    })
}

/// Lüders instrument of a spectral decomposition: outcome `Index(i)` with Kraus operator `P_i`.
pub fn projective_instrument(decomp: &SpectralDecomposition) -> KrausInstrument {
    KrausInstrument {
        dim: decomp.dim(),
        outcomes: decomp
            .clusters()
            .iter()
            .enumerate()
            .map(|(i, c)| Outcome {
                label: Label::Index(i),
                kraus: vec![c.projector.clone()],
            })
            .collect(),
    }
}

/// Rank-one instrument `|psi_k><psi_k|` over a complete orthonormal basis, outcomes `Index(k)`.
pub fn rank1_instrument(basis: &[CVector]) -> Result<KrausInstrument> {
    let dim = basis.first().map_or(0, Vec::len);
    let deviation = basis_deviation(basis, dim);
    if dim == 0 || deviation > BASIS_TOL {
        return Err(Error::IncompleteBasis { deviation });
    }
    Ok(KrausInstrument {
        dim,
        outcomes: basis
            .iter()
            .enumerate()
            .map(|(k, v)| Outcome {
                label: Label::Index(k),
                kraus: vec![ComplexMatrix::projector(v)],
            })
            .collect(),
    })
}

/// Rank-one instrument over the eigenvectors held by `decomp`, outcomes `Vector(m, mu)`.
pub fn eigenvector_instrument(decomp: &SpectralDecomposition) -> KrausInstrument {
    KrausInstrument {
        dim: decomp.dim(),
        outcomes: decomp
            .clusters()
            .iter()
            .enumerate()
            .flat_map(|(m, c)| {
                c.eigenvectors
                    .iter()
                    .enumerate()
                    .map(move |(mu, v)| Outcome {
                        label: Label::Vector(m, mu),
                        kraus: vec![ComplexMatrix::projector(v)],
                    })
            })
            .collect(),
    }
}

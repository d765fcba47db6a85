//! Fluctuating quantum heat under three levels of coarse-graining.
//!
//! * `Eigenstate`: trajectories `|psi_{m,mu}> -> |phi_{n,nu}>` through a chosen
//!   eigenbasis of the state, heat `e_n - <psi|H|psi>`. Higher moments depend
//!   on the basis chosen inside degenerate eigenspaces of the state.
//! * `PartialCG`: trajectories `(m, n)` through the spectral projectors `P_m`
//!   of the state, heat `e_n - tr[Pi_n P_m H P_m] / tr[Pi_n P_m]`.
//! * `FullCG`: a single energy measurement, heat identically zero.

mod basis;
mod distribution;
mod moments;
mod report;
mod skew;

pub use basis::{bloch_pair, bloch_unitary};
pub use distribution::{
    cauchy_schwarz_terms, eigenstate_distribution, full_cg_distribution, full_cg_numeric_heats,
    partial_cg_distribution, CauchySchwarzTerm,
};
pub use moments::{
    binomial, moments_compact_eigenstate, moments_enumerated, moments_trace_formula_eigenstate,
    moments_trace_formula_partial, variance, MAX_ORDER,
};
pub use report::{analyze, FqhReport, PerLevel};
pub use skew::{skew_information, variance_identities, VarianceIdentities};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instruments::Label;
use crate::linalg::{
    CVector, ComplexMatrix, DensityState, HermitianOperator, SpectralDecomposition, Tolerances,
    EIGENVECTOR_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Eigenstate,
    PartialCg,
    FullCg,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Eigenstate, Level::PartialCg, Level::FullCg];

    pub fn name(self) -> &'static str {
        match self {
            Level::Eigenstate => "eigenstate",
            Level::PartialCg => "partial_cg",
            Level::FullCg => "full_cg",
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "eigenstate" | "q" => Ok(Level::Eigenstate),
            "partial" | "partial_cg" | "partial-cg" | "s" => Ok(Level::PartialCg),
            "full" | "full_cg" | "full-cg" | "b" => Ok(Level::FullCg),
            other => Err(format!(
                "unknown level {other:?} (expected eigenstate, partial or full)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatEntry {
    pub label: Label,
    pub probability: f64,
    pub heat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatDistribution {
    pub level: Level,
    pub entries: Vec<HeatEntry>,
    /// Which eigenbasis of the state produced the trajectories; only set for `Eigenstate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_tag: Option<String>,
}

impl HeatDistribution {
    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    /// Sums probabilities over labels that agree after `Label::coarsen`,
    /// keeping the mean heat of each group.
    pub fn coarsened(&self, level: Level) -> HeatDistribution {
        let mut groups: std::collections::BTreeMap<Label, (f64, f64)> = Default::default();
        for e in &self.entries {
            let g = groups.entry(e.label.coarsen()).or_default();
            g.0 += e.probability;
            g.1 += e.probability * e.heat;
        }
        HeatDistribution {
            level,
            entries: groups
                .into_iter()
                .map(|(label, (p, ph))| HeatEntry {
                    label,
                    probability: p,
                    heat: if p > 0.0 { ph / p } else { 0.0 },
                })
                .collect(),
            basis_tag: None,
        }
    }
}

/// A state and Hamiltonian together with the spectral data every heat
/// definition needs. `state` holds the chosen eigenbasis of `rho`.
#[derive(Debug, Clone)]
pub struct HeatProblem {
    rho: DensityState,
    hamiltonian: HermitianOperator,
    state: SpectralDecomposition,
    energy: SpectralDecomposition,
    basis_tag: String,
}

impl HeatProblem {
    /// Default eigenbasis of `rho`: inside each degenerate eigenspace the
    /// vectors diagonalise the compression of `H`, so a state commuting with
    /// `H` gets a joint eigenbasis.
    pub fn new(rho: DensityState, hamiltonian: HermitianOperator) -> Result<Self> {
        Self::with_tolerances(rho, hamiltonian, &Tolerances::default())
    }

    pub fn with_tolerances(
        rho: DensityState,
        hamiltonian: HermitianOperator,
        tol: &Tolerances,
    ) -> Result<Self> {
        if rho.dim() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: hamiltonian.dim(),
            });
        }
        let mut state = rho.operator().spectral_with(tol)?;
        for m in 0..state.clusters().len() {
            let vectors = &state.clusters()[m].eigenvectors;
            if vectors.len() < 2 {
                continue;
            }
            let block = ComplexMatrix::from_fn(vectors.len(), |i, j| {
                hamiltonian.matrix().sandwich(&vectors[i], &vectors[j])
            });
            let e = HermitianOperator::new(block)?.eigh()?;
            let unitary = ComplexMatrix::from_fn(vectors.len(), |i, j| e.eigenvectors[j][i]);
            state = state.rebase_cluster(m, &unitary)?;
        }
        let energy = hamiltonian.spectral_with(tol)?;
        Ok(Self {
            rho,
            hamiltonian,
            state,
            energy,
            basis_tag: "eigh".to_string(),
        })
    }

    /// Replaces the eigenbasis of `rho` by caller-supplied vectors, which must
    /// each be an eigenvector of `rho`.
    pub fn with_eigenbasis(self, basis: &[CVector], tag: impl Into<String>) -> Result<Self> {
        let state = SpectralDecomposition::from_eigenbasis(
            self.rho.operator(),
            basis,
            self.state.cluster_tol(),
        )?;
        Ok(Self {
            state,
            basis_tag: tag.into(),
            ..self
        })
    }

    pub fn with_state_decomposition(
        self,
        state: SpectralDecomposition,
        tag: impl Into<String>,
    ) -> Result<Self> {
        state.verify_eigenbasis_of(self.rho.operator())?;
        Ok(Self {
            state,
            basis_tag: tag.into(),
            ..self
        })
    }

    pub fn with_energy_decomposition(self, energy: SpectralDecomposition) -> Result<Self> {
        energy.verify_eigenbasis_of(&self.hamiltonian)?;
        Ok(Self { energy, ..self })
    }

    /// Re-parameterises the first two-dimensional eigenspace of `rho` with the
    /// Bloch angles `(theta, phi)`, relative to the current basis of that block.
    pub fn with_bloch(self, theta: f64, phi: f64) -> Result<Self> {
        let cluster = self
            .state
            .first_two_dim_cluster()
            .ok_or(Error::NoDegenerateBlock)?;
        let state = self
            .state
            .rebase_cluster(cluster, &bloch_unitary(theta, phi))?;
        let basis_tag = format!("{}+bloch(theta={theta},phi={phi})", self.basis_tag);
        Ok(Self {
            state,
            basis_tag,
            ..self
        })
    }

    pub fn rho(&self) -> &DensityState {
        &self.rho
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn state(&self) -> &SpectralDecomposition {
        &self.state
    }

    pub fn energy(&self) -> &SpectralDecomposition {
        &self.energy
    }

    pub fn basis_tag(&self) -> &str {
        &self.basis_tag
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// `||[rho, H]||_F <= 1e-9 ||rho||_F ||H||_F`
    pub fn is_commuting(&self) -> bool {
        let comm = self
            .rho
            .matrix()
            .commutator(self.hamiltonian.matrix())
            .frobenius_norm();
        comm <= 1e-9 * self.rho.matrix().frobenius_norm() * self.hamiltonian.frobenius_norm()
    }

    /// Every basis vector of `rho` is also an eigenvector of `H`.
    pub fn basis_diagonalises_hamiltonian(&self) -> bool {
        let scale = self.hamiltonian.frobenius_norm().max(1.0);
        self.state.basis().iter().all(|v| {
            let e = self.hamiltonian.expectation(v);
            let hv = self.hamiltonian.matrix().mul_vec(v);
            let residual: f64 = hv.iter().zip(v).map(|(x, y)| (x - y * e).norm_sqr()).sum();
            residual.sqrt() <= EIGENVECTOR_TOL * scale
        })
    }

    /// Eigenvalue of `rho` on cluster `m`, with small negative rounding clipped to zero.
    pub(crate) fn weight(&self, m: usize) -> f64 {
        self.state.clusters()[m].eigenvalue.max(0.0)
    }
}

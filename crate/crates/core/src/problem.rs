//! Problem inputs: the JSON problem file and the built-in two-qubit fixture.
//!
//! Complex numbers are written as two-element arrays `[re, im]`:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "hamiltonian": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
//!   "rho": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]],
//!   "basis": [[[0.7071067811865476, 0], [0.7071067811865476, 0]],
//!             [[0.7071067811865476, 0], [-0.7071067811865476, 0]]],
//!   "tolerances": {"hermiticity": 1e-10, "trace": 1e-9, "psd": 1e-9, "cluster": 1e-8}
//! }
//! ```
//!
//! `basis` and `tolerances` are optional.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fqh::{bloch_pair, HeatProblem};
use crate::linalg::{
    basis_vector, kron_vec, CVector, ComplexMatrix, DensityState, HermitianOperator, Tolerances,
};

pub type ComplexEntry = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    pub hamiltonian: Vec<Vec<ComplexEntry>>,
    pub rho: Vec<Vec<ComplexEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<ComplexEntry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

/// Validated inputs.
#[derive(Debug, Clone)]
pub struct Problem {
    pub hamiltonian: HermitianOperator,
    pub rho: DensityState,
    /// Reference eigenbasis of `rho`, if the input fixes one.
    pub basis: Option<Vec<CVector>>,
    pub tolerances: Tolerances,
}

/// How the eigenbasis of `rho` is chosen for the eigenstate-trajectory heat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisChoice {
    /// Whatever the eigensolver returns.
    Default,
    /// The basis stored with the problem.
    File,
    /// Bloch angles applied to the first two-dimensional eigenspace of the
    /// reference basis (the stored basis if present, else the eigensolver's).
    Bloch { theta: f64, phi: f64 },
}

impl std::str::FromStr for BasisChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "default" => Ok(BasisChoice::Default),
            "file" => Ok(BasisChoice::File),
            _ => {
                let angles = s.strip_prefix("bloch:").ok_or_else(|| {
                    format!("unknown basis {s:?} (expected default, file or bloch:THETA,PHI)")
                })?;
                let (t, p) = angles
                    .split_once(',')
                    .ok_or_else(|| format!("bloch basis needs two angles, got {angles:?}"))?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| format!("bad angle {x:?}: {e}"))
                };
                Ok(BasisChoice::Bloch {
                    theta: parse(t)?,
                    phi: parse(p)?,
                })
            }
        }
    }
}

fn to_matrix(rows: &[Vec<ComplexEntry>], dim: usize) -> Result<ComplexMatrix> {
    if rows.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rows.len(),
        });
    }
    ComplexMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect(),
    )
}

fn from_matrix(m: &ComplexMatrix) -> Vec<Vec<ComplexEntry>> {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

impl Problem {
    pub fn from_file(file: &ProblemFile) -> Result<Self> {
        Self::from_file_with(file, Tolerances::from_env())
    }

    /// `defaults` apply unless the file carries its own tolerances.
    pub fn from_file_with(file: &ProblemFile, defaults: Tolerances) -> Result<Self> {
        let tolerances = file.tolerances.unwrap_or(defaults);
        let h = to_matrix(&file.hamiltonian, file.dim)?;
        let rho = to_matrix(&file.rho, file.dim)?;
        let hamiltonian = HermitianOperator::with_tol(h, tolerances.hermiticity)?;
        let rho = DensityState::with_tolerances(rho, &tolerances)?;
        let basis = file
            .basis
            .as_ref()
            .map(|vs| {
                vs.iter()
                    .map(|v| {
                        if v.len() != file.dim {
                            return Err(Error::DimensionMismatch {
                                expected: file.dim,
                                found: v.len(),
                            });
                        }
                        Ok(v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                    })
                    .collect::<Result<Vec<CVector>>>()
            })
            .transpose()?;
        Ok(Self {
            hamiltonian,
            rho,
            basis,
            tolerances,
        })
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, ProblemError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(ProblemError::Parse)?;
        Self::from_file(&file).map_err(ProblemError::Invalid)
    }

    pub fn to_file(&self) -> ProblemFile {
        ProblemFile {
            dim: self.rho.dim(),
            hamiltonian: from_matrix(self.hamiltonian.matrix()),
            rho: from_matrix(self.rho.matrix()),
            basis: self.basis.as_ref().map(|b| {
                b.iter()
                    .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                    .collect()
            }),
            tolerances: Some(self.tolerances),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// The reference problem: the stored basis if any, otherwise the eigensolver's.
    pub fn reference_problem(&self) -> Result<HeatProblem> {
        let p = HeatProblem::with_tolerances(
            self.rho.clone(),
            self.hamiltonian.clone(),
            &self.tolerances,
        )?;
        match &self.basis {
            Some(b) => p.with_eigenbasis(b, "file"),
            None => Ok(p),
        }
    }

    pub fn heat_problem(&self, choice: BasisChoice) -> Result<HeatProblem> {
        match choice {
            BasisChoice::Default => HeatProblem::with_tolerances(
                self.rho.clone(),
                self.hamiltonian.clone(),
                &self.tolerances,
            ),
            BasisChoice::File => match &self.basis {
                Some(_) => self.reference_problem(),
                None => Err(Error::MissingBasis),
            },
            BasisChoice::Bloch { theta, phi } => self.reference_problem()?.with_bloch(theta, phi),
        }
    }

    /// Two qubits with reference basis `{|+>, |->}` of each factor.
    ///
    /// `H = |00><00| + 3|01><01| + 5|10><10| + 7|11><11|`, where
    /// `|1> = |psi+_{pi/2,0}>` and `|0> = |psi-_{pi/2,0}>`, and
    /// `rho = |+><+| (x) 0.2*1 + |-><-| (x) (0.1|+><+| + 0.5|-><-|)`.
    /// The stored basis is `{|+,+>, |+,->, |-,+>, |-,->}`, which diagonalises
    /// `rho` and fixes the reference for the Bloch parameterisation of its
    /// degenerate block `|+><+| (x) 1`.
    pub fn two_qubit_example() -> Self {
        let plus = basis_vector(2, 0);
        let minus = basis_vector(2, 1);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let (one, zero) = bloch_pair(half_pi, 0.0, &plus, &minus);

        let energies = [
            (&zero, &zero, 1.0),
            (&zero, &one, 3.0),
            (&one, &zero, 5.0),
            (&one, &one, 7.0),
        ];
        let mut h = ComplexMatrix::zeros(4);
        for (a, b, e) in energies {
            h = &h + &ComplexMatrix::projector(&kron_vec(a, b)).scale_real(e);
        }

        let proj = ComplexMatrix::projector;
        let first = proj(&plus).kron(&ComplexMatrix::identity(2).scale_real(0.2));
        let second =
            proj(&minus).kron(&(&proj(&plus).scale_real(0.1) + &proj(&minus).scale_real(0.5)));
        let rho = &first + &second;

        let basis = vec![
            kron_vec(&plus, &plus),
            kron_vec(&plus, &minus),
            kron_vec(&minus, &plus),
            kron_vec(&minus, &minus),
        ];
        let tolerances = Tolerances::from_env();
        Self {
            hamiltonian: HermitianOperator::with_tol(h, tolerances.hermiticity)
                .expect("fixture Hamiltonian is Hermitian"),
            rho: DensityState::with_tolerances(rho, &tolerances).expect("fixture state is valid"),
            basis: Some(basis),
            tolerances,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot parse problem file: {0}")]
    Parse(serde_json::Error),
    #[error("invalid problem: {0}")]
    Invalid(Error),
}

//! Fluctuating quantum heat of a projective energy measurement.
//!
//! Given a state `rho` and a Hamiltonian `H`, the crate computes the exact
//! distribution and moments of the heat along eigenstate trajectories, along
//! partially coarse-grained trajectories (degenerate subspaces of `rho`), and
//! for the fully coarse-grained energy measurement, together with the
//! skew-information identities and variance bounds that relate them.

pub mod cli;
pub mod error;
pub mod fqh;
pub mod instruments;
pub mod linalg;
pub mod problem;
pub mod random;
pub mod sampler;

pub use error::{Error, Result};

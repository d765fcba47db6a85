#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use fqh_core::linalg::{CVector, DensityState, HermitianOperator};
use fqh_core::random;
use rand::Rng;

pub fn fqh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqh"))
        .args(args)
        .env_remove("FQH_TOLERANCE_SCALE")
        .output()
        .expect("fqh binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("readable")).expect("valid JSON")
}

/// Eigenvalues with random repetitions: `len` values in groups of size 1 to 3.
pub fn repeated_spectrum(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let value = rng.random_range(-3.0..3.0);
        let d = rng.random_range(1..=3).min(len - out.len());
        out.extend(std::iter::repeat_n(value, d));
    }
    out
}

/// A random pair with `dim` in 2..=8: `rho` degenerate about three times in
/// four, `H` generic or, one time in four, degenerate in a random basis.
pub fn random_pair(rng: &mut impl Rng) -> (DensityState, HermitianOperator) {
    let dim = rng.random_range(2..=8);
    let rho = random::density(dim, rng);
    let h = if rng.random_bool(0.25) {
        let basis = random::unitary_basis(dim, rng);
        HermitianOperator::from_spectrum(&repeated_spectrum(dim, rng), &basis).expect("Hermitian")
    } else {
        random::hermitian(dim, rng)
    };
    (rho, h)
}

/// `rho` diagonal in an eigenbasis of `h`, with repeated eigenvalues.
pub fn commuting_pair(rng: &mut impl Rng) -> (DensityState, HermitianOperator) {
    let dim = rng.random_range(2..=8);
    let basis: Vec<CVector> = random::unitary_basis(dim, rng);
    let h =
        HermitianOperator::from_spectrum(&repeated_spectrum(dim, rng), &basis).expect("Hermitian");
    let weights: Vec<f64> = repeated_spectrum(dim, rng)
        .iter()
        .map(|x| x.abs() + 0.1)
        .collect();
    (random::density_in_basis(&weights, &basis), h)
}

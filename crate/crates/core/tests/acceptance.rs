//! Acceptance criteria, one test each. Every test prints a single
//! `[PASS]` or `[FAIL]` line; run with `--nocapture` to see them.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use common::{commuting_pair, fqh, random_pair, read_json, stderr};
use fqh_core::fqh::{
    analyze, full_cg_distribution, partial_cg_distribution, skew_information, HeatDistribution,
    HeatProblem,
};
use fqh_core::linalg::{DensityState, HermitianOperator};
use fqh_core::problem::{BasisChoice, Problem};
use fqh_core::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXAMPLE_VAR_S: f64 = 4.6;

const AC1_TOL: f64 = 1e-9;
const AC1_BUDGET: Duration = Duration::from_secs(1);
const AC2_SLACK: f64 = 1e-9;
const AC2_EQUALITY: f64 = 1e-6;
const AC2_BUDGET: Duration = Duration::from_secs(10);
const AC3_INSTANCES: usize = 500;
const AC3_FIRST_MOMENT: f64 = 1e-9;
const AC3_SKEW_IDENTITY: f64 = 1e-8;
const AC3_ORDERING_SLACK: f64 = 1e-9;
const AC3_BUDGET: Duration = Duration::from_secs(30);
const AC4_RELATIVE: f64 = 1e-8;
const AC4_ORDER: usize = 4;
const AC5_INSTANCES: usize = 100;
const AC5_TOL: f64 = 1e-9;
const AC6_ENTRYWISE: f64 = 1e-10;
const AC6_MIN_SPREAD: f64 = 1e-3;
const AC7_N: &str = "1000000";
const AC7_SEED: &str = "42";
const AC7_BAND: f64 = 0.05;
const AC7_BUDGET: Duration = Duration::from_secs(20);
const AC8_INSTANCES: usize = 200;
const AC8_TOL: f64 = 1e-10;

/// Seed shared by AC3 and AC4 so both see the same 500 instances.
const IDENTITY_SUITE_SEED: u64 = 0x5eed_0003;

fn verdict(id: &str, title: &str, ok: bool, detail: String) {
    println!(
        "[{}] {id} {title}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{id} failed: {detail}");
}

#[test]
fn ac1_example_partial_variance() {
    let start = Instant::now();
    let out = fqh(&["analyze", "--example", "two-qubit"]);
    let elapsed = start.elapsed();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    let var_s = report["variances"]["partial_cg"].as_f64().expect("var_s");
    let err = (var_s - EXAMPLE_VAR_S).abs();
    let ok = out.status.code() == Some(0) && err <= AC1_TOL && elapsed < AC1_BUDGET;
    verdict(
        "AC1",
        "two-qubit var_s = 4.6",
        ok,
        format!(
            "var_s = {var_s:.17}, |error| = {err:.1e} (tol {AC1_TOL:e}), exit {:?}, {elapsed:.2?} (budget {AC1_BUDGET:?})",
            out.status.code()
        ),
    );
}

#[test]
fn ac2_sweep_structure() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let start = Instant::now();
    let out = fqh(&[
        "sweep",
        "--example",
        "two-qubit",
        "--theta-steps",
        "64",
        "--phi-steps",
        "64",
        "--out",
        csv.to_str().unwrap(),
    ]);
    let elapsed = start.elapsed();
    let text = std::fs::read_to_string(&csv).unwrap_or_default();
    let mut lines = text.lines();
    let header_ok = lines.next() == Some("theta,phi,var_q,var_s,var_diff");
    let rows: Vec<[f64; 5]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().expect("number")).collect();
            [v[0], v[1], v[2], v[3], v[4]]
        })
        .collect();
    let min_gap = rows
        .iter()
        .map(|r| r[2] - r[3])
        .fold(f64::INFINITY, f64::min);
    let at = |theta: f64, phi: f64| {
        rows.iter()
            .find(|r| (r[0] - theta).abs() < 1e-12 && (r[1] - phi).abs() < 1e-12)
            .map(|r| r[2] - r[3])
    };
    let d0 = at(FRAC_PI_2, 0.0).unwrap_or(f64::NAN);
    let dpi = at(FRAC_PI_2, PI).unwrap_or(f64::NAN);
    let ok = out.status.code() == Some(0)
        && header_ok
        && rows.len() == 64 * 64
        && min_gap >= -AC2_SLACK
        && d0 < AC2_EQUALITY
        && dpi < AC2_EQUALITY
        && elapsed < AC2_BUDGET;
    verdict(
        "AC2",
        "64x64 sweep var_q >= var_s with equality at (pi/2, 0), (pi/2, pi)",
        ok,
        format!(
            "{} rows, min(var_q - var_s) = {min_gap:.1e} (slack {AC2_SLACK:e}), gaps {d0:.1e} and {dpi:.1e} (tol {AC2_EQUALITY:e}), {elapsed:.2?} (budget {AC2_BUDGET:?})",
            rows.len()
        ),
    );
}

#[test]
fn ac3_identity_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(IDENTITY_SUITE_SEED);
    let start = Instant::now();
    let mut worst_first = 0.0f64;
    let mut worst_identity = 0.0f64;
    let mut worst_ordering = f64::INFINITY;
    let mut degenerate = 0;
    for _ in 0..AC3_INSTANCES {
        let (rho, h) = random_pair(&mut rng);
        let p = HeatProblem::new(rho, h).unwrap();
        degenerate += p.state().is_degenerate() as usize;
        let r = analyze(&p, 2).unwrap();
        for m in r.moments.iter() {
            worst_first = worst_first.max(m[0].abs());
        }
        worst_identity =
            worst_identity.max((r.variances.eigenstate - r.skew_bound_eigenstate).abs());
        let margin = (r.variances.partial_cg - r.variances.full_cg)
            .min(r.variances.eigenstate - r.variances.partial_cg);
        worst_ordering = worst_ordering.min(margin);
    }
    let elapsed = start.elapsed();
    let ok = worst_first <= AC3_FIRST_MOMENT
        && worst_identity <= AC3_SKEW_IDENTITY
        && worst_ordering >= -AC3_ORDERING_SLACK
        && degenerate > 0
        && elapsed < AC3_BUDGET;
    verdict(
        "AC3",
        "first moments, skew identity and variance ordering on 500 pairs",
        ok,
        format!(
            "{degenerate} degenerate states, max |<Q>| = {worst_first:.1e} (tol {AC3_FIRST_MOMENT:e}), max |var_q - skew sum| = {worst_identity:.1e} (tol {AC3_SKEW_IDENTITY:e}), min ordering margin = {worst_ordering:.1e} (slack {AC3_ORDERING_SLACK:e}), {elapsed:.2?} (budget {AC3_BUDGET:?})"
        ),
    );
}

#[test]
fn ac4_enumeration_matches_trace_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(IDENTITY_SUITE_SEED);
    let mut worst = 0.0f64;
    for _ in 0..AC3_INSTANCES {
        let (rho, h) = random_pair(&mut rng);
        let r = analyze(&HeatProblem::new(rho, h).unwrap(), AC4_ORDER).unwrap();
        for (en, tf) in r.moments.iter().zip(r.trace_formula_moments.iter()) {
            for (a, b) in en.iter().zip(tf) {
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
            }
        }
    }
    verdict(
        "AC4",
        "enumerated moments equal trace-formula moments for k <= 4",
        worst <= AC4_RELATIVE,
        format!("max relative discrepancy {worst:.1e} (tol {AC4_RELATIVE:e}, denominator max(|a|, |b|, 1))"),
    );
}

#[test]
fn ac5_commuting_collapse() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut worst = 0.0f64;
    let mut all_flagged = true;
    for _ in 0..AC5_INSTANCES {
        let (rho, h) = commuting_pair(&mut rng);
        let r = analyze(&HeatProblem::new(rho, h).unwrap(), 4).unwrap();
        all_flagged &= r.commuting_case && r.violations.is_empty();
        for m in r.moments.iter().chain(r.trace_formula_moments.iter()) {
            worst = worst.max(m.iter().fold(0.0, |a: f64, x| a.max(x.abs())));
        }
    }
    verdict(
        "AC5",
        "commuting inputs give vanishing moments",
        worst <= AC5_TOL && all_flagged,
        format!("max |moment| over k <= 4, three levels, both methods = {worst:.1e} (tol {AC5_TOL:e}), all detected as commuting: {all_flagged}"),
    );
}

fn max_entry_gap(a: &HeatDistribution, b: &HeatDistribution) -> f64 {
    assert_eq!(a.entries.len(), b.entries.len());
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| {
            assert_eq!(x.label, y.label);
            (x.probability - y.probability)
                .abs()
                .max((x.heat - y.heat).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn ac6_gauge_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst = 0.0f64;
    let mut rebased = 0;
    for _ in 0..200 {
        let (rho, h) = random_pair(&mut rng);
        let p = HeatProblem::new(rho, h).unwrap();
        let mut state = p.state().clone();
        let mut energy = p.energy().clone();
        for (m, c) in p.state().clusters().iter().enumerate() {
            if c.multiplicity() > 1 {
                state = state
                    .rebase_cluster(m, &random::unitary(c.multiplicity(), &mut rng))
                    .unwrap();
                rebased += 1;
            }
        }
        for (n, c) in p.energy().clusters().iter().enumerate() {
            if c.multiplicity() > 1 {
                energy = energy
                    .rebase_cluster(n, &random::unitary(c.multiplicity(), &mut rng))
                    .unwrap();
            }
        }
        let q = p
            .clone()
            .with_state_decomposition(state, "rebased")
            .unwrap()
            .with_energy_decomposition(energy)
            .unwrap();
        worst = worst.max(max_entry_gap(
            &partial_cg_distribution(&p),
            &partial_cg_distribution(&q),
        ));
        worst = worst.max(max_entry_gap(
            &full_cg_distribution(&p),
            &full_cg_distribution(&q),
        ));
    }

    let example = Problem::two_qubit_example();
    let var_q = |theta: f64, phi: f64| {
        let p = example
            .heat_problem(BasisChoice::Bloch { theta, phi })
            .unwrap();
        analyze(&p, 2).unwrap().variances.eigenstate
    };
    let (equator, pole) = (var_q(FRAC_PI_2, 0.0), var_q(0.0, 0.0));
    let spread = (equator - pole).abs();
    verdict(
        "AC6",
        "coarse-grained distributions are gauge invariant, eigenstate variance is not",
        worst <= AC6_ENTRYWISE && rebased > 0 && spread > AC6_MIN_SPREAD,
        format!(
            "{rebased} clusters rebased, max entry change {worst:.1e} (tol {AC6_ENTRYWISE:e}); var_q(pi/2, 0) = {equator:.6}, var_q(0, 0) = {pole:.6}, difference {spread:.3} (needs > {AC6_MIN_SPREAD:e})"
        ),
    );
}

#[test]
fn ac7_monte_carlo() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    let start = Instant::now();
    let mut codes = Vec::new();
    for path in &paths {
        let out = fqh(&[
            "sample",
            "--example",
            "two-qubit",
            "--level",
            "partial",
            "--n",
            AC7_N,
            "--seed",
            AC7_SEED,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        codes.push(out.status.code());
    }
    let elapsed = start.elapsed();
    let identical = std::fs::read(&paths[0]).unwrap() == std::fs::read(&paths[1]).unwrap();
    let report = read_json(&paths[0]);
    let var = report["empirical_variance"].as_f64().unwrap();
    let chi = &report["chi_square"];
    let chi_ok = chi["passed"].as_bool().unwrap();
    let ok = (var - EXAMPLE_VAR_S).abs() < AC7_BAND && chi_ok && identical && elapsed < AC7_BUDGET;
    verdict(
        "AC7",
        "Monte Carlo var_s, goodness of fit and reproducibility",
        ok,
        format!(
            "empirical var_s = {var:.6} (|error| {:.4} < {AC7_BAND}), chi-square {:.2} on {} dof vs {:.2} at 99.9%, byte-identical reruns: {identical}, two runs in {elapsed:.2?} (budget {AC7_BUDGET:?})",
            (var - EXAMPLE_VAR_S).abs(),
            chi["statistic"].as_f64().unwrap(),
            chi["dof"],
            chi["critical_value"].as_f64().unwrap(),
        ),
    );
}

fn variance_in(v: &[num_complex::Complex64], h: &HermitianOperator) -> f64 {
    let mean = h.expectation(v);
    let hv = h.matrix().mul_vec(v);
    fqh_core::linalg::inner(&hv, &hv).re - mean * mean
}

#[test]
fn ac8_skew_information_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let (mut min_value, mut worst_commuting, mut worst_purity, mut worst_convexity) =
        (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..AC8_INSTANCES {
        let dim = rand::Rng::random_range(&mut rng, 2..=8);
        let h = random::hermitian(dim, &mut rng);
        let rho = random::density(dim, &mut rng);
        min_value = min_value.min(skew_information(rho.operator(), &h).unwrap());

        let (c_rho, c_h) = commuting_pair(&mut rng);
        worst_commuting =
            worst_commuting.max(skew_information(c_rho.operator(), &c_h).unwrap().abs());

        let psi = random::pure_vector(dim, &mut rng);
        let pure = DensityState::pure(&psi).unwrap();
        let gap = skew_information(pure.operator(), &h).unwrap() - variance_in(&psi, &h);
        worst_purity = worst_purity.max(gap.abs());

        let other = random::density(dim, &mut rng);
        let mid = HermitianOperator::new((rho.matrix() + other.matrix()).scale_real(0.5)).unwrap();
        let lhs = skew_information(&mid, &h).unwrap();
        let rhs = 0.5
            * (skew_information(rho.operator(), &h).unwrap()
                + skew_information(other.operator(), &h).unwrap());
        worst_convexity = worst_convexity.max(lhs - rhs);
    }
    let ok = min_value >= -AC8_TOL
        && worst_commuting <= AC8_TOL
        && worst_purity <= AC8_TOL
        && worst_convexity <= AC8_TOL;
    verdict(
        "AC8",
        "skew information: non-negative, zero when commuting, variance on pure states, midpoint convex",
        ok,
        format!(
            "200 instances each: min value {min_value:.1e}, max commuting value {worst_commuting:.1e}, max |I - Var| on pure states {worst_purity:.1e}, max convexity excess {worst_convexity:.1e} (all to {AC8_TOL:e})"
        ),
    );
}

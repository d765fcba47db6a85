//! `fqh analyze | sweep | sample | example`
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | usage or I/O error |
//! | 2 | the problem file does not parse or fails validation |
//! | 3 | the computation finished but an invariant check failed |

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fqh::{
    analyze, eigenstate_distribution, full_cg_distribution, moments_enumerated,
    partial_cg_distribution, variance, variance_identities, HeatDistribution, HeatProblem, Level,
};
use crate::instruments::Label;
use crate::linalg::TOLERANCE_SCALE_ENV;
use crate::problem::{BasisChoice, Problem, ProblemError};
use crate::sampler::{chi_square_goodness_of_fit, sample, sample_sequential, ChiSquareTest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// Column header of the sweep CSV.
pub const SWEEP_HEADER: &str = "theta,phi,var_q,var_s,var_diff";
/// Sweep rows with `var_q - var_s` below this are reported as equality points.
pub const EQUALITY_TOL: f64 = 1e-6;
/// Slack on `var_q >= var_s` and on the constancy of `var_s` across the sweep.
pub const SWEEP_SLACK: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "fqh",
    version,
    about = "Fluctuating quantum heat of a projective energy measurement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact distributions, moments, variances and invariant checks.
    Analyze(AnalyzeArgs),
    /// Eigenstate and partially coarse-grained variances over the Bloch angles
    /// of the first two-dimensional eigenspace of rho.
    Sweep(SweepArgs),
    /// Monte Carlo measurement records compared with the exact distribution.
    Sample(SampleArgs),
    /// Print a built-in problem as a problem file.
    Example {
        #[arg(value_enum, default_value_t = Example::TwoQubit)]
        name: Example,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    TwoQubit,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Problem file (JSON).
    #[arg(value_name = "PROBLEM", required_unless_present = "example")]
    pub problem: Option<PathBuf>,
    /// Use a built-in problem instead of a file.
    #[arg(long, value_enum, conflicts_with = "problem")]
    pub example: Option<Example>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: Input,
    /// Highest moment order.
    #[arg(short = 'k', long = "K", visible_alias = "order", default_value_t = 4)]
    pub order: usize,
    /// Eigenbasis of rho: default, file, or bloch:THETA,PHI.
    #[arg(long, default_value = "default")]
    pub basis: BasisChoice,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 64)]
    pub theta_steps: usize,
    #[arg(long, default_value_t = 64)]
    pub phi_steps: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub input: Input,
    /// eigenstate, partial or full.
    #[arg(long, default_value = "partial")]
    pub level: Level,
    /// Number of draws.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Highest moment order.
    #[arg(short = 'k', long = "K", visible_alias = "order", default_value_t = 4)]
    pub order: usize,
    /// Eigenbasis of rho: default, file, or bloch:THETA,PHI.
    #[arg(long, default_value = "default")]
    pub basis: BasisChoice,
    /// Simulate the first measurement and then the energy measurement on the
    /// collapsed state, instead of drawing from the joint distribution.
    #[arg(long)]
    pub two_step: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::invalid(e.to_string())
    }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        Failure::invalid(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(violations) if violations.is_empty() => EXIT_OK,
        Ok(violations) => {
            for v in violations {
                eprintln!("invariant violated: {v}");
            }
            EXIT_VIOLATION
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Runs a parsed command and returns the invariant violations it found.
pub fn execute(command: &Command) -> Result<Vec<String>, Failure> {
    check_tolerance_scale()?;
    match command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Example { name } => {
            let text = to_json(&builtin(*name).to_file())?;
            emit(None, &text)?;
            Ok(Vec::new())
        }
    }
}

fn check_tolerance_scale() -> Result<(), Failure> {
    match std::env::var(TOLERANCE_SCALE_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(x) if x.is_finite() && x > 0.0 => Ok(()),
            _ => Err(Failure::usage(format!(
                "{TOLERANCE_SCALE_ENV} must be a positive number, got {s:?}"
            ))),
        },
        Err(_) => Ok(()),
    }
}

fn builtin(example: Example) -> Problem {
    match example {
        Example::TwoQubit => Problem::two_qubit_example(),
    }
}

pub fn load(input: &Input) -> Result<Problem, Failure> {
    if let Some(e) = input.example {
        return Ok(builtin(e));
    }
    let path = input
        .problem
        .as_ref()
        .ok_or_else(|| Failure::usage("no problem file given"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(Problem::from_json(&text)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write to stdout: {e}"))),
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<Vec<String>, Failure> {
    let problem = load(&args.input)?;
    let heat = problem.heat_problem(args.basis)?;
    let report = analyze(&heat, args.order)?;
    emit(args.out.as_deref(), &to_json(&report)?)?;
    Ok(report.violations)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub phi: f64,
    pub var_q: f64,
    pub var_s: f64,
    pub var_diff: f64,
}

/// Variances on the grid `theta_i = pi i / theta_steps`, `phi_j = 2 pi j / phi_steps`,
/// theta-major, with the Bloch angles applied to the reference basis of `problem`.
pub fn sweep(
    problem: &Problem,
    theta_steps: usize,
    phi_steps: usize,
) -> crate::Result<Vec<SweepRow>> {
    let base = problem.reference_problem()?;
    if base.state().first_two_dim_cluster().is_none() {
        return Err(Error::NoDegenerateBlock);
    }
    let grid: Vec<(f64, f64)> = (0..theta_steps)
        .flat_map(|i| {
            (0..phi_steps).map(move |j| {
                (
                    std::f64::consts::PI * i as f64 / theta_steps as f64,
                    std::f64::consts::TAU * j as f64 / phi_steps as f64,
                )
            })
        })
        .collect();
    grid.par_iter()
        .map(|&(theta, phi)| {
            let ids = variance_identities(&base.clone().with_bloch(theta, phi)?)?;
            Ok(SweepRow {
                theta,
                phi,
                var_q: ids.var_q,
                var_s: ids.var_s,
                var_diff: ids.var_q - ids.var_s,
            })
        })
        .collect()
}

/// CSV with header [`SWEEP_HEADER`], LF line endings and 17 significant digits.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::with_capacity(96 * (rows.len() + 1));
    s.push_str(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.theta, r.phi, r.var_q, r.var_s, r.var_diff
        );
    }
    s
}

/// Violations of `var_q >= var_s` and of the constancy of `var_s`.
pub fn sweep_violations(rows: &[SweepRow]) -> Vec<String> {
    let mut v = Vec::new();
    for r in rows.iter().filter(|r| r.var_diff < -SWEEP_SLACK) {
        v.push(format!(
            "var_q < var_s at theta={}, phi={}: difference {:e}",
            r.theta, r.phi, r.var_diff
        ));
    }
    if let Some(first) = rows.first() {
        let spread = rows
            .iter()
            .map(|r| (r.var_s - first.var_s).abs())
            .fold(0.0, f64::max);
        if spread > SWEEP_SLACK {
            v.push(format!("var_s varies across the sweep by {spread:e}"));
        }
    }
    v
}

fn cmd_sweep(args: &SweepArgs) -> Result<Vec<String>, Failure> {
    if args.theta_steps == 0 || args.phi_steps == 0 {
        return Err(Failure::usage(
            "--theta-steps and --phi-steps must be positive",
        ));
    }
    let problem = load(&args.input)?;
    let rows = sweep(&problem, args.theta_steps, args.phi_steps)?;
    emit(args.out.as_deref(), &sweep_csv(&rows))?;
    let equal: Vec<String> = rows
        .iter()
        .filter(|r| r.var_diff < EQUALITY_TOL)
        .map(|r| format!("({}, {})", r.theta, r.phi))
        .collect();
    eprintln!(
        "{} grid points, min var_diff {:e}, var_q = var_s (within {EQUALITY_TOL:e}) at {} points: {}",
        rows.len(),
        rows.iter().map(|r| r.var_diff).fold(f64::INFINITY, f64::min),
        equal.len(),
        equal.join(" ")
    );
    Ok(sweep_violations(&rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub label: Label,
    pub heat: f64,
    pub probability: f64,
    pub count: u64,
    pub empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub level: Level,
    pub seed: u64,
    pub n_samples: u64,
    pub two_step: bool,
    pub basis_tag: String,
    pub rows: Vec<SampleRow>,
    pub max_probability_deviation: f64,
    /// `x[k - 1]` is the order-`k` moment.
    pub analytic_moments: Vec<f64>,
    pub empirical_moments: Vec<f64>,
    pub moment_deviations: Vec<f64>,
    pub analytic_variance: f64,
    pub empirical_variance: f64,
    pub chi_square: ChiSquareTest,
}

pub fn distribution(problem: &HeatProblem, level: Level) -> HeatDistribution {
    match level {
        Level::Eigenstate => eigenstate_distribution(problem),
        Level::PartialCg => partial_cg_distribution(problem),
        Level::FullCg => full_cg_distribution(problem),
    }
}

pub fn sample_report(
    problem: &HeatProblem,
    level: Level,
    n: u64,
    seed: u64,
    order: usize,
    two_step: bool,
) -> crate::Result<SampleReport> {
    if order < 2 {
        return Err(Error::InvalidOrder(order));
    }
    let dist = distribution(problem, level);
    let run = if two_step {
        sample_sequential(problem, level, n, seed, order)?
    } else {
        sample(&dist, n, seed, order)?
    };
    let analytic_moments = moments_enumerated(&dist, order)?;
    let rows: Vec<SampleRow> = dist
        .entries
        .iter()
        .map(|e| SampleRow {
            label: e.label.clone(),
            heat: e.heat,
            probability: e.probability,
            count: run.counts.get(&e.label).copied().unwrap_or(0),
            empirical: run.empirical_probs.get(&e.label).copied().unwrap_or(0.0),
        })
        .collect();
    let max_probability_deviation = rows
        .iter()
        .map(|r| (r.empirical - r.probability).abs())
        .fold(0.0, f64::max);
    let moment_deviations = run
        .empirical_moments
        .iter()
        .zip(&analytic_moments)
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(SampleReport {
        level,
        seed,
        n_samples: n,
        two_step,
        basis_tag: problem.basis_tag().to_string(),
        chi_square: chi_square_goodness_of_fit(&run, &dist),
        max_probability_deviation,
        analytic_variance: variance(&analytic_moments),
        empirical_variance: run.empirical_variance(),
        analytic_moments,
        empirical_moments: run.empirical_moments,
        moment_deviations,
        rows,
    })
}

fn cmd_sample(args: &SampleArgs) -> Result<Vec<String>, Failure> {
    if args.n == 0 {
        return Err(Failure::usage("--n must be positive"));
    }
    let problem = load(&args.input)?;
    let heat = problem.heat_problem(args.basis)?;
    let report = sample_report(
        &heat,
        args.level,
        args.n,
        args.seed,
        args.order,
        args.two_step,
    )?;
    emit(args.out.as_deref(), &to_json(&report)?)?;
    Ok(Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = [SweepRow {
            theta: 0.0,
            phi: 0.5,
            var_q: 4.6,
            var_s: 4.6,
            var_diff: 0.0,
        }];
        let csv = sweep_csv(&rows);
        let mut lines = csv.split('\n');
        assert_eq!(lines.next(), Some(SWEEP_HEADER));
        let fields: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(fields, vec![0.0, 0.5, 4.6, 4.6, 0.0]);
        assert_eq!(lines.next(), Some(""));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn sweep_needs_a_two_dimensional_block() {
        let mut p = Problem::two_qubit_example();
        p.basis = None;
        p.rho =
            crate::linalg::DensityState::new(crate::linalg::ComplexMatrix::from_real_diagonal(&[
                0.1, 0.2, 0.3, 0.4,
            ]))
            .unwrap();
        assert_eq!(sweep(&p, 2, 2).unwrap_err(), Error::NoDegenerateBlock);
    }

    #[test]
    fn sweep_rows_are_theta_major() {
        let rows = sweep(&Problem::two_qubit_example(), 2, 3).unwrap();
        let angles: Vec<(f64, f64)> = rows.iter().map(|r| (r.theta, r.phi)).collect();
        let pi = std::f64::consts::PI;
        assert_eq!(
            angles,
            vec![
                (0.0, 0.0),
                (0.0, 2.0 * pi / 3.0),
                (0.0, 4.0 * pi / 3.0),
                (pi / 2.0, 0.0),
                (pi / 2.0, 2.0 * pi / 3.0),
                (pi / 2.0, 4.0 * pi / 3.0),
            ]
        );
        assert!(sweep_violations(&rows).is_empty());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["fqh", "analyze"]), EXIT_USAGE);
        assert_eq!(run(["fqh", "bogus"]), EXIT_USAGE);
        assert_eq!(
            run(["fqh", "analyze", "/nonexistent/problem.json"]),
            EXIT_USAGE
        );
    }
}

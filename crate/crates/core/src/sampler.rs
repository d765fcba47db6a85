//! Monte Carlo measurement records.
//!
//! Draws use `ChaCha8Rng::seed_from_u64(seed)`, whose output stream is fixed
//! by the ChaCha8 algorithm and identical on every platform. Categorical draws
//! invert the cumulative distribution with one uniform per draw.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::fqh::{HeatDistribution, HeatProblem, Level};
use crate::instruments::{
    apply, eigenvector_instrument, energy_changes, projective_instrument, sequential,
    KrausInstrument, Label,
};

/// Confidence level of the goodness-of-fit tests.
pub const CHI_SQUARE_LEVEL: f64 = 0.999;
/// Categories expected to receive fewer draws than this are pooled into one bin.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRun {
    pub level: Level,
    pub seed: u64,
    pub n_samples: u64,
    pub counts: BTreeMap<Label, u64>,
    /// `counts / n_samples`
    pub empirical_probs: BTreeMap<Label, f64>,
    /// `empirical_moments[k - 1]` is the sample mean of `heat^k`.
    pub empirical_moments: Vec<f64>,
}

impl SampleRun {
    fn from_counts(
        level: Level,
        seed: u64,
        n: u64,
        counts: BTreeMap<Label, u64>,
        heats: &BTreeMap<Label, f64>,
        order: usize,
    ) -> Self {
        let mut empirical_moments = vec![0.0; order];
        for (label, &c) in &counts {
            let heat = heats[label];
            let mut power = 1.0;
            for slot in empirical_moments.iter_mut() {
                power *= heat;
                *slot += c as f64 * power;
            }
        }
        empirical_moments.iter_mut().for_each(|m| *m /= n as f64);
        let empirical_probs = counts
            .iter()
            .map(|(l, &c)| (l.clone(), c as f64 / n as f64))
            .collect();
        Self {
            level,
            seed,
            n_samples: n,
            counts,
            empirical_probs,
            empirical_moments,
        }
    }

    pub fn empirical_variance(&self) -> f64 {
        self.empirical_moments[1] - self.empirical_moments[0].powi(2)
    }
}

/// Cumulative-sum inversion over non-negative weights.
#[derive(Debug, Clone)]
struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    fn new(weights: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .into_iter()
            .map(|w| {
                acc += w.max(0.0);
                acc
            })
            .collect();
        if cumulative.last().is_none_or(|&t| t.is_nan() || t <= 0.0) {
            return Err(Error::EmptyDistribution);
        }
        Ok(Self { cumulative })
    }

    fn draw(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().unwrap();
        let target = rng.random::<f64>() * total;
        // Zero-weight categories share their predecessor's cumulative value and are never hit.
        self.cumulative
            .partition_point(|&c| c <= target)
            .min(self.cumulative.len() - 1)
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > crate::fqh::MAX_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    Ok(())
}

/// `n` i.i.d. draws from the joint distribution `dist`.
pub fn sample(dist: &HeatDistribution, n: u64, seed: u64, order: usize) -> Result<SampleRun> {
    check_order(order)?;
    if n == 0 || dist.entries.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let categorical = Categorical::new(dist.entries.iter().map(|e| e.probability))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies = vec![0u64; dist.entries.len()];
    for _ in 0..n {
        tallies[categorical.draw(&mut rng)] += 1;
    }
    let heats: BTreeMap<Label, f64> = dist
        .entries
        .iter()
        .map(|e| (e.label.clone(), e.heat))
        .collect();
    let counts = dist
        .entries
        .iter()
        .zip(tallies)
        .filter(|(_, c)| *c > 0)
        .map(|(e, c)| (e.label.clone(), c))
        .collect();
    Ok(SampleRun::from_counts(
        dist.level, seed, n, counts, &heats, order,
    ))
}

/// Simulates the physical record: the first measurement collapses the state,
/// the energy measurement is then applied to the collapsed state. Heats are
/// the conditional energy changes of the composite instrument.
pub fn sample_sequential(
    problem: &HeatProblem,
    level: Level,
    n: u64,
    seed: u64,
    order: usize,
) -> Result<SampleRun> {
    check_order(order)?;
    if n == 0 {
        return Err(Error::EmptyDistribution);
    }
    let (first, second) = match level {
        Level::Eigenstate => (
            eigenvector_instrument(problem.state()),
            Some(eigenvector_instrument(problem.energy())),
        ),
        Level::PartialCg => (
            projective_instrument(problem.state()),
            Some(projective_instrument(problem.energy())),
        ),
        Level::FullCg => (projective_instrument(problem.energy()), None),
    };

    let composite = match &second {
        Some(s) => sequential(&first, s)?,
        None => first.clone(),
    };
    let heats: BTreeMap<Label, f64> =
        energy_changes(&composite, problem.rho(), problem.hamiltonian())?
            .into_iter()
            .map(|(l, _, h)| (l, h))
            .collect();

    let stage_one = Stage::new(&first, problem)?;
    // Conditional second-stage distributions, one per reachable first outcome.
    let stage_two: Vec<Option<(Vec<Label>, Categorical)>> = match &second {
        Some(s) => stage_one
            .post_states
            .iter()
            .map(|post| {
                post.as_ref()
                    .map(|rho| -> Result<_> {
                        let stats = apply(s, rho)?;
                        let labels = stats.iter().map(|o| o.label.clone()).collect();
                        Ok((
                            labels,
                            Categorical::new(stats.iter().map(|o| o.probability))?,
                        ))
                    })
                    .transpose()
            })
            .collect::<Result<_>>()?,
        None => vec![None; stage_one.labels.len()],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<Label, u64> = BTreeMap::new();
    for _ in 0..n {
        let i = stage_one.categorical.draw(&mut rng);
        let label = match &stage_two[i] {
            Some((labels, cat)) => Label::seq(
                stage_one.labels[i].clone(),
                labels[cat.draw(&mut rng)].clone(),
            ),
            None => stage_one.labels[i].clone(),
        };
        *counts.entry(label).or_insert(0) += 1;
    }
    Ok(SampleRun::from_counts(
        level, seed, n, counts, &heats, order,
    ))
}

struct Stage {
    labels: Vec<Label>,
    categorical: Categorical,
    post_states: Vec<Option<crate::linalg::DensityState>>,
}

impl Stage {
    fn new(inst: &KrausInstrument, problem: &HeatProblem) -> Result<Self> {
        let stats = apply(inst, problem.rho())?;
        Ok(Self {
            labels: stats.iter().map(|s| s.label.clone()).collect(),
            categorical: Categorical::new(stats.iter().map(|s| s.probability))?,
            post_states: stats.into_iter().map(|s| s.post_state).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub critical_value: f64,
    pub passed: bool,
}

fn verdict(statistic: f64, dof: usize) -> ChiSquareTest {
    if dof == 0 {
        return ChiSquareTest {
            statistic,
            dof,
            critical_value: 0.0,
            passed: statistic == 0.0,
        };
    }
    let critical_value = ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(CHI_SQUARE_LEVEL);
    ChiSquareTest {
        statistic,
        dof,
        critical_value,
        passed: statistic <= critical_value,
    }
}

/// Pearson goodness-of-fit of `run` against the probabilities in `dist`.
/// Categories with expected count below 5 are pooled.
pub fn chi_square_goodness_of_fit(run: &SampleRun, dist: &HeatDistribution) -> ChiSquareTest {
    let n = run.n_samples as f64;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    let mut impossible_hits = 0u64;
    for e in &dist.entries {
        let observed = *run.counts.get(&e.label).unwrap_or(&0) as f64;
        let expected = n * e.probability.max(0.0);
        if expected == 0.0 {
            impossible_hits += observed as u64;
        } else if expected < MIN_EXPECTED {
            pooled.0 += observed;
            pooled.1 += expected;
        } else {
            bins.push((observed, expected));
        }
    }
    let unknown: u64 = run
        .counts
        .iter()
        .filter(|(l, _)| !dist.entries.iter().any(|e| &e.label == *l))
        .map(|(_, c)| c)
        .sum();
    if impossible_hits + unknown > 0 {
        return verdict(f64::INFINITY, bins.len().max(1));
    }
    if pooled.1 > 0.0 {
        bins.push(pooled);
    }
    let statistic = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    verdict(statistic, bins.len().saturating_sub(1))
}

/// Two-sample chi-square homogeneity test between two runs.
pub fn chi_square_two_sample(a: &SampleRun, b: &SampleRun) -> ChiSquareTest {
    let (na, nb) = (a.n_samples as f64, b.n_samples as f64);
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut labels: Vec<&Label> = a.counts.keys().chain(b.counts.keys()).collect();
    labels.sort();
    labels.dedup();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for l in labels {
        let oa = *a.counts.get(l).unwrap_or(&0) as f64;
        let ob = *b.counts.get(l).unwrap_or(&0) as f64;
        if oa + ob < 2.0 * MIN_EXPECTED {
            pooled.0 += oa;
            pooled.1 += ob;
        } else {
            bins.push((oa, ob));
        }
    }
    if pooled.0 + pooled.1 > 0.0 {
        bins.push(pooled);
    }
    let statistic = bins
        .iter()
        .map(|(oa, ob)| (ka * oa - kb * ob).powi(2) / (oa + ob))
        .sum();
    verdict(statistic, bins.len().saturating_sub(1))
}

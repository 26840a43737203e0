//! Bordered symmetric random-walk null model.
//!
//! Scores live on classes 1..=num_classes. Each step a walk may stay,
//! move one class up, or one class down, except at the borders where the
//! outward move is forbidden. Probabilities are uniform over *complete
//! paths* of the requested length, not over per-step transitions, so the
//! distribution comes from exact integer path counting.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::corpus::{Corpus, Year};
use crate::indicators::{self, Counting};

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("invalid walk config: {0}")]
    InvalidConfig(String),
    #[error("no journal left after the begin-class filter")]
    EmptyCohort,
    #[error("journal `{journal_id}` has no defined INO-P in {year}")]
    UndefinedInoP { journal_id: String, year: Year },
    #[error("path counts overflow the sampler's integer range")]
    PathCountOverflow,
}

/// Lattice geometry and walk length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    num_classes: u32,
    start_class: u32,
    steps: u32,
}

impl WalkConfig {
    pub fn new(num_classes: u32, start_class: u32, steps: u32) -> Result<Self, WalkError> {
        if num_classes == 0 {
            return Err(WalkError::InvalidConfig("num_classes must be >= 1".into()));
        }
        if start_class == 0 || start_class > num_classes {
            return Err(WalkError::InvalidConfig(format!(
                "start_class {start_class} outside [1, {num_classes}]"
            )));
        }
        if steps == 0 {
            return Err(WalkError::InvalidConfig("steps must be >= 1".into()));
        }
        Ok(WalkConfig {
            num_classes,
            start_class,
            steps,
        })
    }

    /// Ten classes, starting from the top one.
    pub fn from_top(steps: u32) -> Result<Self, WalkError> {
        WalkConfig::new(10, 10, steps)
    }

    pub fn num_classes(&self) -> u32 {
        self.num_classes
    }

    pub fn start_class(&self) -> u32 {
        self.start_class
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    fn successors(&self, class: u32) -> impl Iterator<Item = u32> {
        let lo = if class > 1 { class - 1 } else { class };
        let hi = if class < self.num_classes { class + 1 } else { class };
        lo..=hi
    }
}

/// Probability mass of one net-decline value, as an exact count and ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    /// start class - end class; negative when the walk ends higher.
    pub net_decline: i64,
    pub path_count: BigUint,
    pub probability: BigRational,
}

/// Exact distribution of net declines after a fixed number of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkDistribution {
    pub config: WalkConfig,
    /// Ascending by net decline; probabilities sum to exactly 1.
    pub outcomes: Vec<WalkOutcome>,
    pub total_paths: BigUint,
}

impl WalkDistribution {
    pub fn probability(&self, net_decline: i64) -> Option<&BigRational> {
        self.outcomes
            .iter()
            .find(|o| o.net_decline == net_decline)
            .map(|o| &o.probability)
    }

    /// Floating-point view of the distribution, in percent.
    pub fn percentages(&self) -> Vec<(i64, f64)> {
        self.outcomes
            .iter()
            .map(|o| (o.net_decline, 100.0 * ratio_to_f64(&o.probability)))
            .collect()
    }
}

/// Nearest f64 of an exact probability.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

use rational_to_f64 as ratio_to_f64;

/// Counts all complete paths of length `steps` from the start class by
/// dynamic programming and normalizes per end class.
pub fn walk_distribution(config: &WalkConfig) -> WalkDistribution {
    let n = config.num_classes as usize;
    let mut counts = vec![BigUint::zero(); n + 1];
    counts[config.start_class as usize] = BigUint::one();
    for _ in 0..config.steps {
        let mut next = vec![BigUint::zero(); n + 1];
        for (class, count) in counts.iter().enumerate().skip(1) {
            if count.is_zero() {
                continue;
            }
            for succ in config.successors(class as u32) {
                next[succ as usize] += count;
            }
        }
        counts = next;
    }
    let total_paths: BigUint = counts.iter().sum();
    let total = BigInt::from(total_paths.clone());
    let mut outcomes = Vec::new();
    // Highest end class first: ascending net decline.
    for class in (1..=n).rev() {
        if counts[class].is_zero() {
            continue;
        }
        let path_count = counts[class].clone();
        outcomes.push(WalkOutcome {
            net_decline: config.start_class as i64 - class as i64,
            probability: BigRational::new(BigInt::from(path_count.clone()), total.clone()),
            path_count,
        });
    }
    WalkDistribution {
        config: *config,
        outcomes,
        total_paths,
    }
}

/// Class of a percentage score: class c covers (100(c-1)/n, 100c/n], with
/// 0 falling into class 1.
pub fn class_of(score_pct: f64, num_classes: u32) -> u32 {
    let raw = (score_pct * num_classes as f64 / 100.0).ceil() as i64;
    raw.clamp(1, num_classes as i64) as u32
}

/// Histogram of observed net declines over a journal cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct NetDeclineHistogram {
    pub counts: BTreeMap<i64, u32>,
    pub n: u32,
}

impl NetDeclineHistogram {
    pub fn percentages(&self) -> Vec<(i64, f64)> {
        self.counts
            .iter()
            .map(|(&d, &c)| (d, 100.0 * c as f64 / self.n as f64))
            .collect()
    }

    pub fn share(&self, net_decline: i64) -> f64 {
        self.counts.get(&net_decline).copied().unwrap_or(0) as f64 / self.n as f64
    }
}

/// Classifies each journal's whole-count INO-P in its entry year and in
/// `end_year`, keeps journals whose begin class is at least
/// `min_begin_class`, and histograms begin class minus end class.
pub fn empirical_net_decline<'a, I>(
    corpus: &Corpus,
    cohort: I,
    min_begin_class: u32,
    end_year: Year,
    num_classes: u32,
) -> Result<NetDeclineHistogram, WalkError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: BTreeMap<i64, u32> = BTreeMap::new();
    let mut n = 0u32;
    for journal_id in cohort {
        let entry = corpus
            .entry_year(journal_id)
            .map_err(|_| WalkError::UndefinedInoP {
                journal_id: journal_id.to_string(),
                year: end_year,
            })?;
        let begin = ino_p_or_undefined(corpus, journal_id, entry)?;
        let begin_class = class_of(begin, num_classes);
        if begin_class < min_begin_class {
            continue;
        }
        let end = ino_p_or_undefined(corpus, journal_id, end_year)?;
        let end_class = class_of(end, num_classes);
        *counts.entry(begin_class as i64 - end_class as i64).or_insert(0) += 1;
        n += 1;
    }
    if n == 0 {
        return Err(WalkError::EmptyCohort);
    }
    Ok(NetDeclineHistogram { counts, n })
}

fn ino_p_or_undefined(corpus: &Corpus, journal_id: &str, year: Year) -> Result<f64, WalkError> {
    indicators::ino_p(corpus, journal_id, year, Counting::WholeArticle)
        .map(|v| v.value)
        .map_err(|_| WalkError::UndefinedInoP {
            journal_id: journal_id.to_string(),
            year,
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub net_decline: i64,
    pub model_pct: f64,
    pub empirical_pct: f64,
}

/// Chi-square goodness of fit of the empirical histogram against the
/// model, after merging adjacent low-expectation bins.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareGof {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// Union support, ascending by net decline.
    pub rows: Vec<ComparisonRow>,
    /// Total variation distance between the two distributions.
    pub tv_distance: f64,
    /// `None` when merging leaves fewer than two bins.
    pub chi_square: Option<ChiSquareGof>,
    pub n_empirical: u32,
}

/// Side-by-side percentages, total variation distance and a chi-square
/// goodness-of-fit statistic (bins with model expectation below 5 merged
/// into their neighbors).
pub fn compare_distributions(
    model: &WalkDistribution,
    empirical: &NetDeclineHistogram,
) -> ComparisonReport {
    let support: BTreeSet<i64> = model
        .outcomes
        .iter()
        .map(|o| o.net_decline)
        .chain(empirical.counts.keys().copied())
        .collect();
    let mut rows = Vec::new();
    let mut tv = 0.0;
    let mut expected = Vec::new();
    let mut observed = Vec::new();
    for &d in &support {
        let model_p = model.probability(d).map(ratio_to_f64).unwrap_or(0.0);
        let empirical_p = empirical.share(d);
        tv += (model_p - empirical_p).abs();
        rows.push(ComparisonRow {
            net_decline: d,
            model_pct: 100.0 * model_p,
            empirical_pct: 100.0 * empirical_p,
        });
        expected.push(model_p * empirical.n as f64);
        observed.push(empirical.counts.get(&d).copied().unwrap_or(0) as f64);
    }
    ComparisonReport {
        rows,
        tv_distance: tv / 2.0,
        chi_square: chi_square_gof(&expected, &observed),
        n_empirical: empirical.n,
    }
}

/// Merges adjacent bins left to right until each reaches expectation 5
/// (folding a short final bin into its predecessor), then evaluates the
/// Pearson statistic with bins-1 degrees of freedom.
fn chi_square_gof(expected: &[f64], observed: &[f64]) -> Option<ChiSquareGof> {
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&e, &o) in expected.iter().zip(observed) {
        acc.0 += e;
        acc.1 += o;
        if acc.0 >= 5.0 {
            bins.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 > 0.0 || acc.1 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    if bins.len() < 2 {
        return None;
    }
    let statistic: f64 = bins
        .iter()
        .map(|&(e, o)| (o - e) * (o - e) / e)
        .sum();
    let df = bins.len() - 1;
    let dist = ChiSquared::new(df as f64).expect("df >= 1");
    Some(ChiSquareGof {
        statistic,
        df,
        p_value: (1.0 - dist.cdf(statistic)).clamp(0.0, 1.0),
    })
}

/// Draws complete paths uniformly at random, weighting each transition by
/// the number of path completions behind it. Used by the synthetic
/// generator to realize walk dynamics matching `walk_distribution`.
#[derive(Debug)]
pub struct WalkSampler {
    config: WalkConfig,
    /// table[k][class-1]: number of complete paths of length k from class.
    table: Vec<Vec<u128>>,
}

impl WalkSampler {
    pub fn new(config: WalkConfig) -> Result<Self, WalkError> {
        let n = config.num_classes as usize;
        let mut table = vec![vec![1u128; n]];
        for k in 1..=config.steps as usize {
            let mut row = vec![0u128; n];
            for class in 1..=n {
                let mut sum = 0u128;
                for succ in config.successors(class as u32) {
                    sum = sum
                        .checked_add(table[k - 1][succ as usize - 1])
                        .ok_or(WalkError::PathCountOverflow)?;
                }
                row[class - 1] = sum;
            }
            table.push(row);
        }
        Ok(WalkSampler { config, table })
    }

    /// Classes visited by one uniformly drawn path, start included
    /// (length steps + 1). `steps` may be shorter than the configured
    /// maximum.
    pub fn sample_path<R: rand::Rng>(&self, steps: u32, rng: &mut R) -> Vec<u32> {
        assert!(steps <= self.config.steps, "sampler built for fewer steps");
        let mut path = Vec::with_capacity(steps as usize + 1);
        let mut class = self.config.start_class;
        path.push(class);
        for k in (1..=steps as usize).rev() {
            let total = self.table[k][class as usize - 1];
            let mut draw = rng.random_range(0..total);
            for succ in self.config.successors(class) {
                let weight = self.table[k - 1][succ as usize - 1];
                if draw < weight {
                    class = succ;
                    break;
                }
                draw -= weight;
            }
            path.push(class);
        }
        path
    }
}

//! Monte-Carlo estimates over independent sampled row sets.
//!
//! Trial `t` always uses stream `t` of the sampling generator and per-trial
//! results are reduced with exact integer counters, so every estimate is a
//! pure function of `(params, trials)` regardless of the rayon pool size.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Subspace;

use super::sampling::{sample_mask, SampleMask, SamplingParams};
use super::search::{count_witnesses, find_kernel_witness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceEstimate {
    pub trials: u64,
    pub successes: u64,
    pub fraction: f64,
    /// Binomial standard error `sqrt(f (1 - f) / trials)`.
    pub stderr: f64,
    pub mean_cardinality: f64,
    /// Trials in which row 0 was sampled (no witness is possible then).
    pub zero_row_sampled: u64,
}

fn binomial_stderr(fraction: f64, trials: u64) -> f64 {
    (fraction * (1.0 - fraction) / trials as f64).sqrt()
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: "must be positive".into(),
        });
    }
    Ok(())
}

fn masks(
    params: &SamplingParams,
    trials: u64,
) -> impl ParallelIterator<Item = Result<SampleMask>> + '_ {
    (0..trials)
        .into_par_iter()
        .map(move |t| sample_mask(params, t))
}

/// Fraction of trials in which a kernel witness exists.
pub fn estimate_existence_probability(
    params: &SamplingParams,
    trials: u64,
) -> Result<ExistenceEstimate> {
    check_trials(trials)?;
    let per_trial: Vec<(bool, u64, bool)> = masks(params, trials)
        .map(|q| {
            let q = q?;
            let found = find_kernel_witness(&q, params.k)?.witness.is_some();
            Ok((found, q.cardinality(), q.contains(0)))
        })
        .collect::<Result<_>>()?;
    let successes = per_trial.iter().filter(|t| t.0).count() as u64;
    let rows: u64 = per_trial.iter().map(|t| t.1).sum();
    let zero_row_sampled = per_trial.iter().filter(|t| t.2).count() as u64;
    let fraction = successes as f64 / trials as f64;
    Ok(ExistenceEstimate {
        trials,
        successes,
        fraction,
        stderr: binomial_stderr(fraction, trials),
        mean_cardinality: rows as f64 / trials as f64,
        zero_row_sampled,
    })
}

/// Sample moments of the exact witness count `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountMoments {
    pub trials: u64,
    pub mean: f64,
    /// Standard error of `mean`.
    pub mean_stderr: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// `variance / mean^2`.
    pub variance_ratio: f64,
    /// Delta-method standard error of `variance_ratio`.
    pub variance_ratio_stderr: f64,
    /// Empirical `P(X = 0)`.
    pub zero_fraction: f64,
    pub zero_stderr: f64,
}

/// Counts witnesses exactly in each trial and summarizes the distribution.
pub fn estimate_count_moments(params: &SamplingParams, trials: u64) -> Result<CountMoments> {
    check_trials(trials)?;
    if trials < 2 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: "need at least 2 trials for a variance".into(),
        });
    }
    let counts: Vec<u64> = masks(params, trials)
        .map(|q| {
            let report = count_witnesses(&q?, params.k)?;
            Ok(report
                .exact_count
                .and_then(|c| c.to_u64())
                .expect("count is bounded by the enumeration budget"))
        })
        .collect::<Result<_>>()?;
    Ok(summarize_counts(&counts))
}

pub(crate) fn summarize_counts(counts: &[u64]) -> CountMoments {
    let t = counts.len() as f64;
    // exact raw power sums, then convert
    let (mut s1, mut s2, mut s3, mut s4) = (0u128, 0u128, 0f64, 0f64);
    let mut zeros = 0u64;
    for &x in counts {
        let x128 = x as u128;
        s1 += x128;
        s2 += x128 * x128;
        let xf = x as f64;
        s3 += xf * xf * xf;
        s4 += xf * xf * xf * xf;
        zeros += (x == 0) as u64;
    }
    let a = s1 as f64 / t;
    let b = s2 as f64 / t;
    let m3 = s3 / t;
    let m4 = s4 / t;
    let pop_var = (s2 as f64 - (s1 as f64) * (s1 as f64) / t) / t;
    let variance = pop_var * t / (t - 1.0);
    let variance_ratio = variance / (a * a);
    // R = b/a^2 - 1; gradient (-2b/a^3, 1/a^2) against Cov(X, X^2)
    let ga = -2.0 * b / (a * a * a);
    let gb = 1.0 / (a * a);
    let var_x = pop_var;
    let cov_x_x2 = m3 - a * b;
    let var_x2 = m4 - b * b;
    let var_r = (ga * ga * var_x + 2.0 * ga * gb * cov_x_x2 + gb * gb * var_x2) / t;
    let zero_fraction = zeros as f64 / t;
    CountMoments {
        trials: counts.len() as u64,
        mean: a,
        mean_stderr: (variance / t).sqrt(),
        variance,
        variance_ratio,
        variance_ratio_stderr: var_r.max(0.0).sqrt(),
        zero_fraction,
        zero_stderr: binomial_stderr(zero_fraction, counts.len() as u64),
    }
}

/// Empirical `E[X_U X_V]`: the fraction of trials in which `Q` misses both
/// `U^⊥` and `V^⊥`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEstimate {
    pub trials: u64,
    pub mean: f64,
    pub stderr: f64,
}

pub fn estimate_pair_moment(
    params: &SamplingParams,
    u: &Subspace,
    v: &Subspace,
    trials: u64,
) -> Result<PairEstimate> {
    check_trials(trials)?;
    let mut union: Vec<u64> = u.orthogonal_complement().span_words()?;
    union.extend(v.orthogonal_complement().span_words()?);
    union.sort_unstable();
    union.dedup();
    let hits: Vec<bool> = masks(params, trials)
        .map(|q| {
            let q = q?;
            Ok(union.iter().all(|&x| !q.contains(x)))
        })
        .collect::<Result<_>>()?;
    let successes = hits.iter().filter(|&&h| h).count();
    let mean = successes as f64 / trials as f64;
    Ok(PairEstimate {
        trials,
        mean,
        stderr: binomial_stderr(mean, trials),
    })
}

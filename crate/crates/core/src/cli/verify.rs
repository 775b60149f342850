//! Invariant suites behind `verify`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::counting::{
    gaussian_binomial, grassmannian_bounds, log2_big, pair_count_table_with, t_bound_claim_check,
    PairCountMethod, Verdict,
};
use crate::experiment::moments::{
    bound_terms, covariance_ratio, covariance_ratio_direct, first_moment, single_indicator_mean,
    variance_ratio_bound, variance_ratio_exact_report,
};
use crate::experiment::SamplingParams;
use crate::gf2::Subspace;
use crate::grassmannian::{enumerate_grassmannian, DEFAULT_BUDGET};
use crate::transform::verify_ortho_lemma;

use super::{ConfigError, VerifyConfig};

const ORTHO_TOL: f64 = 1e-10;
const COV_TOL: f64 = 1e-12;
const MOMENT_TOL: f64 = 1e-10;
const P_HATS: [f64; 5] = [0.01, 0.05, 0.1, 0.3, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LemmaOrtho,
    Grassmannian,
    IntersectionRange,
    Covariance,
    TBound,
    Moments,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::LemmaOrtho,
        Suite::Grassmannian,
        Suite::IntersectionRange,
        Suite::Covariance,
        Suite::TBound,
        Suite::Moments,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmaOrtho => "lemma-ortho",
            Suite::Grassmannian => "grassmannian",
            Suite::IntersectionRange => "intersection-range",
            Suite::Covariance => "covariance",
            Suite::TBound => "t-bound",
            Suite::Moments => "moments",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "grassmannian-counts" => Some(Suite::Grassmannian),
            _ => Suite::ALL.into_iter().find(|x| x.name() == s),
        }
    }

    /// Comma-separated names, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>, ConfigError> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        let mut out = Vec::new();
        for name in s.split(',') {
            let suite = Suite::parse(name.trim()).ok_or_else(|| {
                let known: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                ConfigError::new(
                    "suite",
                    format!(
                        "unknown suite `{name}`; expected one of {} or all",
                        known.join(", ")
                    ),
                )
            })?;
            if !out.contains(&suite) {
                out.push(suite);
            }
        }
        Ok(out)
    }

    pub fn default_n_max(self) -> u32 {
        match self {
            Suite::LemmaOrtho => 8,
            Suite::Grassmannian | Suite::IntersectionRange => 6,
            Suite::Covariance | Suite::Moments => 5,
            Suite::TBound => 0,
        }
    }

    /// Enumeration work the suite would do at `n_max`, checked against
    /// `DEFAULT_BUDGET` before anything runs.
    pub fn preflight(self, n_max: Option<u32>) -> Result<(), String> {
        if self == Suite::TBound {
            return Ok(());
        }
        let n_max = n_max.unwrap_or(self.default_n_max());
        if n_max == 0 || n_max > 20 {
            return Err(format!("n-max must be in 1..=20, got {n_max}"));
        }
        let budget = BigUint::from(DEFAULT_BUDGET);
        let mut work = BigUint::from(0u32);
        for n in 1..=n_max {
            for d in 0..=n {
                let g = gaussian_binomial(n, d).map_err(|e| e.to_string())?;
                work += match self {
                    Suite::LemmaOrtho | Suite::Grassmannian => g,
                    _ => &g * &g,
                };
            }
            if work > budget {
                return Err(format!(
                    "n-max = {n_max} needs more than {DEFAULT_BUDGET} enumerated subspaces or pairs"
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub params: BTreeMap<String, Value>,
    pub passed: bool,
    /// Slack against the tolerance or bound; nonnegative when passed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub passed: bool,
    pub instances: Vec<InstanceResult>,
    /// Guard trip or evaluation error; the suite then fails without running.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn instance(pairs: &[(&str, Value)], margin: f64, detail: Option<String>) -> InstanceResult {
    InstanceResult {
        params: params(pairs),
        passed: margin >= 0.0,
        margin: Some(margin),
        detail,
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

type SuiteOutput = crate::Result<Vec<InstanceResult>>;

fn lemma_ortho(n_max: u32) -> SuiteOutput {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for d in 0..=n {
            let all: Vec<Subspace> = enumerate_grassmannian(n, d)?.collect();
            let worst = all
                .par_iter()
                .map(verify_ortho_lemma)
                .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
            out.push(instance(
                &[
                    ("n", json!(n)),
                    ("d", json!(d)),
                    ("subspaces", json!(all.len())),
                ],
                ORTHO_TOL - worst,
                Some(format!("max deviation {worst:e}")),
            ));
        }
    }
    Ok(out)
}

fn grassmannian(n_max: u32) -> SuiteOutput {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for d in 0..=n {
            let it = enumerate_grassmannian(n, d)?;
            let seen = it.count() as u64;
            let formula = gaussian_binomial(n, d)?;
            out.push(InstanceResult {
                params: params(&[("n", json!(n)), ("d", json!(d))]),
                passed: BigUint::from(seen) == formula,
                margin: None,
                detail: Some(format!("enumerated {seen}, formula {formula}")),
            });
        }
    }
    // strict bounds need no enumeration; check the full representable range
    let mut worst = f64::INFINITY;
    let mut all = true;
    for n in 2..=64 {
        for d in 1..n {
            let g = gaussian_binomial(n, d)?;
            let (lo, hi) = grassmannian_bounds(n, d)?;
            all &= lo < g && g < hi;
            worst = worst
                .min(log2_big(&g) - log2_big(&lo))
                .min(log2_big(&hi) - log2_big(&g));
        }
    }
    out.push(InstanceResult {
        params: params(&[("n", json!("2..=64")), ("d", json!("1..n"))]),
        passed: all,
        margin: Some(worst),
        detail: Some("2^{d(n-d)} < |Gr(n,d)| < 2^{d(n-d+1)}; margin in log2".into()),
    });
    Ok(out)
}

fn intersection_range(n_max: u32) -> SuiteOutput {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for k in 0..=n {
            let table = pair_count_table_with(n, k, PairCountMethod::Exhaustive, DEFAULT_BUDGET)?;
            let invariants = table.check_invariants();
            let structural =
                pair_count_table_with(n, k, PairCountMethod::Structural, DEFAULT_BUDGET)?;
            let agree = structural.counts == table.counts;
            let detail = match (&invariants, agree) {
                (Err(e), _) => e.to_string(),
                (Ok(()), false) => "enumerated counts differ from structural formula".into(),
                (Ok(()), true) => format!("support {:?}", table.counts.keys().collect::<Vec<_>>()),
            };
            out.push(InstanceResult {
                params: params(&[("n", json!(n)), ("k", json!(k))]),
                passed: invariants.is_ok() && agree,
                margin: None,
                detail: Some(detail),
            });
        }
    }
    Ok(out)
}

fn covariance(n_max: u32) -> SuiteOutput {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for k in 0..=n {
            let subspaces: Vec<Subspace> = enumerate_grassmannian(n, k)?.collect();
            for &p_hat in &P_HATS {
                let params_ = SamplingParams::new(n, k, p_hat, 0.1, 0)?;
                let mut worst = 0.0f64;
                for u in &subspaces {
                    for v in &subspaces {
                        let a = covariance_ratio(u, v, &params_)?;
                        let b = covariance_ratio_direct(u, v, &params_)?;
                        worst = worst.max(rel_err(a, b));
                    }
                }
                out.push(instance(
                    &[("n", json!(n)), ("k", json!(k)), ("p_hat", json!(p_hat))],
                    COV_TOL - worst,
                    Some(format!("max relative difference {worst:e}")),
                ));
            }
        }
    }
    Ok(out)
}

fn t_bound(n: u32, k: u32, c: f64) -> SuiteOutput {
    let report = t_bound_claim_check(n, k)?;
    let mut out = vec![InstanceResult {
        params: params(&[("n", json!(n)), ("k", json!(k))]),
        passed: report.hypothesis_holds,
        margin: Some(report.hypothesis_margin),
        detail: Some(match report.verdict {
            Verdict::NotApplicable => "min(k, n-k) >= 12 log2 n fails; claim not applicable".into(),
            _ => "min(k, n-k) >= 12 log2 n".into(),
        }),
    }];
    for row in &report.rows {
        out.push(InstanceResult {
            params: params(&[("n", json!(n)), ("k", json!(k)), ("d", json!(row.d))]),
            passed: row.holds,
            margin: Some(row.margin),
            detail: Some(format!(
                "log2 ratio {:.3} vs threshold {:.1}",
                row.log2_ratio, row.log2_threshold
            )),
        });
    }
    // rate at the edge of the allowed range: p 2^{n-k} = 2c k(n-k)
    let kk = k as f64 * (n - k) as f64;
    let p = 2.0 * c * kk / ((n - k) as f64).exp2();
    let p_hat = -(-p).exp_m1();
    let terms = bound_terms(&SamplingParams::new(n, k, p_hat, c, 0)?);
    for cond in &terms.conditions {
        out.push(InstanceResult {
            params: params(&[
                ("n", json!(n)),
                ("k", json!(k)),
                ("c", json!(c)),
                ("p", json!(p)),
            ]),
            passed: cond.holds,
            margin: Some(cond.margin),
            detail: Some(cond.name.clone()),
        });
    }
    Ok(out)
}

fn moments(n_max: u32) -> SuiteOutput {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for k in 0..=n {
            let subspaces: Vec<Subspace> = enumerate_grassmannian(n, k)?.collect();
            let table = pair_count_table_with(n, k, PairCountMethod::Exhaustive, DEFAULT_BUDGET)?;
            let g = subspaces.len() as f64;
            for &p_hat in &P_HATS {
                let params_ = SamplingParams::new(n, k, p_hat, 0.1, 0)?;
                let mean = first_moment(&params_)?.exp();
                let mean_direct = g * single_indicator_mean(&params_);
                let exact = variance_ratio_exact_report(&params_, &table)?;
                let bound = variance_ratio_bound(&params_)?;
                let mut pair_sum = 0.0;
                for u in &subspaces {
                    for v in &subspaces {
                        pair_sum += covariance_ratio_direct(u, v, &params_)?;
                    }
                }
                let ratio_direct = pair_sum / (g * g);
                let e1 = rel_err(mean, mean_direct);
                let e2 = rel_err(exact.value, ratio_direct);
                let slack = bound.value * (1.0 + 1e-12) - exact.value;
                let margin = (MOMENT_TOL - e1).min(MOMENT_TOL - e2).min(slack);
                out.push(instance(
                    &[("n", json!(n)), ("k", json!(k)), ("p_hat", json!(p_hat))],
                    margin,
                    Some(format!(
                        "mean rel err {e1:e}, variance ratio rel err {e2:e}, exact {:e} <= bound {:e}",
                        exact.value, bound.value
                    )),
                ));
            }
        }
    }
    Ok(out)
}

fn run_suite(suite: Suite, config: &VerifyConfig) -> SuiteResult {
    let failed = |error: String| SuiteResult {
        suite,
        passed: false,
        instances: Vec::new(),
        error: Some(error),
    };
    if let Err(e) = suite.preflight(config.n_max) {
        return failed(e);
    }
    let n_max = config.n_max.unwrap_or(suite.default_n_max());
    let result = match suite {
        Suite::LemmaOrtho => lemma_ortho(n_max),
        Suite::Grassmannian => grassmannian(n_max),
        Suite::IntersectionRange => intersection_range(n_max),
        Suite::Covariance => covariance(n_max),
        Suite::TBound => t_bound(config.n, config.k, config.c),
        Suite::Moments => moments(n_max),
    };
    match result {
        Ok(instances) => SuiteResult {
            suite,
            passed: instances.iter().all(|i| i.passed),
            instances,
            error: None,
        },
        Err(e) => failed(e.to_string()),
    }
}

pub fn cmd_verify(config: &VerifyConfig) -> VerifyReport {
    let suites: Vec<SuiteResult> = config
        .suites
        .iter()
        .map(|&s| run_suite(s, config))
        .collect();
    VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

//! Single-shot JSON reports: `witness` and `moments`.

use serde::{Deserialize, Serialize};

use crate::experiment::{
    count_witnesses, find_kernel_witness, moment_report, non_injectivity_pair, pair_residual,
    sample_mask, verify_kernel, MomentReport, SampleMask,
};
use crate::gf2::Subspace;

use super::{MomentsConfig, WitnessConfig};

/// Basis rows as hex words; bit `j` of a word is coordinate `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessBasis {
    pub dim: u32,
    pub rows: Vec<String>,
    /// Basis of `V^⊥`, the rows `Q` has to miss.
    pub complement_rows: Vec<String>,
}

impl WitnessBasis {
    fn new(v: &Subspace) -> Self {
        Self {
            dim: v.dim(),
            rows: hex_rows(v),
            complement_rows: hex_rows(&v.orthogonal_complement()),
        }
    }
}

pub(crate) fn hex_word(x: u64, n: u32) -> String {
    let width = n.div_ceil(4).max(1) as usize;
    format!("{x:0width$x}")
}

fn hex_rows(v: &Subspace) -> Vec<String> {
    v.basis_words()
        .iter()
        .map(|&x| hex_word(x, v.ambient_dim()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    /// `(k+1)`-dimensional witness whose indicator is split.
    pub witness: Option<WitnessBasis>,
    pub reason: Option<String>,
    pub y_support: Vec<u64>,
    pub z_support: Vec<u64>,
    /// `max_{j ∈ Q} |(H y)_j - (H z)_j|`.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub n: u32,
    pub k: u32,
    pub p_hat: f64,
    pub seed: u64,
    pub trial_index: u64,
    pub q_cardinality: u64,
    pub witness: Option<WitnessBasis>,
    /// Why `witness` is null.
    pub reason: Option<String>,
    /// Decimal string; present with `--exact-count`.
    pub exact_count: Option<String>,
    /// `max_{j ∈ Q} |(H 1_V)_j|` for the witness.
    pub residual: Option<f64>,
    pub nodes_explored: u64,
    pub split: Option<SplitRecord>,
}

fn no_witness_reason(q: &SampleMask) -> String {
    if q.contains(0) {
        "zero row sampled".into()
    } else {
        "no subspace avoids the sampled rows".into()
    }
}

fn split_record(q: &SampleMask, k: u32) -> crate::Result<SplitRecord> {
    let report = find_kernel_witness(q, k + 1)?;
    let Some(v) = report.witness else {
        return Ok(SplitRecord {
            witness: None,
            reason: Some(no_witness_reason(q)),
            y_support: Vec::new(),
            z_support: Vec::new(),
            residual: None,
        });
    };
    verify_kernel(q, &v)?;
    let (y, z) = non_injectivity_pair(&v, k)?;
    Ok(SplitRecord {
        witness: Some(WitnessBasis::new(&v)),
        reason: None,
        y_support: y.support().into_iter().map(|i| i as u64).collect(),
        z_support: z.support().into_iter().map(|i| i as u64).collect(),
        residual: Some(pair_residual(q, &y, &z)?),
    })
}

pub fn cmd_witness(config: &WitnessConfig) -> crate::Result<WitnessRecord> {
    let params = &config.params;
    let q = sample_mask(params, config.trial_index)?;
    let report = find_kernel_witness(&q, params.k)?;
    let exact_count = if config.exact_count {
        count_witnesses(&q, params.k)?.exact_count
    } else {
        None
    };
    let residual = match &report.witness {
        Some(v) => Some(verify_kernel(&q, v)?),
        None => None,
    };
    let split = if config.split {
        Some(split_record(&q, params.k)?)
    } else {
        None
    };
    Ok(WitnessRecord {
        n: params.n,
        k: params.k,
        p_hat: params.p_hat,
        seed: params.seed,
        trial_index: config.trial_index,
        q_cardinality: q.cardinality(),
        reason: report.witness.is_none().then(|| no_witness_reason(&q)),
        witness: report.witness.as_ref().map(WitnessBasis::new),
        exact_count: exact_count.map(|c| c.to_string()),
        residual,
        nodes_explored: report.nodes_explored,
        split,
    })
}

pub fn cmd_moments(config: &MomentsConfig) -> crate::Result<MomentReport> {
    moment_report(&config.params)
}

//! Bernoulli row sampling with a counter-based generator.
//!
//! Bit `j` of trial `t` is decided by the `j`-th 64-bit output of ChaCha8 with
//! key derived from `seed` and stream `t`, so it depends only on
//! `(seed, t, j)` no matter how trials are scheduled.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::MAX_COUNT_DIM;
use crate::error::{guard, Error, Result};

/// Largest exponent for which a row mask is materialized.
pub const MAX_SAMPLE_DIM: u32 = 24;

/// Parameters of the row-sampling model: each of the `2^n` rows is kept
/// independently with probability `p_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub n: u32,
    pub k: u32,
    pub p_hat: f64,
    /// `-ln(1 - p_hat)`, so that `(1 - p_hat)^s = exp(-p s)`.
    pub p: f64,
    pub c: f64,
    pub seed: u64,
}

impl SamplingParams {
    pub fn new(n: u32, k: u32, p_hat: f64, c: f64, seed: u64) -> Result<Self> {
        if n == 0 || n > MAX_COUNT_DIM {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("must be in 1..={MAX_COUNT_DIM}, got {n}"),
            });
        }
        if k > n {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("must satisfy 0 <= k <= n = {n}, got {k}"),
            });
        }
        if !(0.0..1.0).contains(&p_hat) {
            return Err(Error::InvalidParameter {
                name: "p_hat",
                reason: format!("must lie in [0, 1), got {p_hat}"),
            });
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("must be a positive finite number, got {c}"),
            });
        }
        let p = -(-p_hat).ln_1p();
        if p < p_hat || (p_hat <= 0.5 && p > 2.0 * p_hat) {
            return Err(Error::Precondition(format!(
                "p = {p} violates p_hat <= p <= 2 p_hat at p_hat = {p_hat}"
            )));
        }
        Ok(Self {
            n,
            k,
            p_hat,
            p,
            c,
            seed,
        })
    }

    pub fn with_p_hat(&self, p_hat: f64) -> Result<Self> {
        Self::new(self.n, self.k, p_hat, self.c, self.seed)
    }

    /// Expected number of sampled rows, `N p_hat`.
    pub fn expected_rows(&self) -> f64 {
        (self.n as f64).exp2() * self.p_hat
    }
}

/// The sampled row set `Q` as a length-`2^n` bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SampleMask {
    n: u32,
    words: Vec<u64>,
    cardinality: u64,
}

fn word_count(n: u32) -> usize {
    (1usize << n).div_ceil(64)
}

impl SampleMask {
    pub fn empty(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_SAMPLE_DIM {
            return Err(guard("sample mask exponent", n, MAX_SAMPLE_DIM));
        }
        Ok(Self {
            n,
            words: vec![0; word_count(n)],
            cardinality: 0,
        })
    }

    pub fn from_rows(n: u32, rows: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut mask = Self::empty(n)?;
        for r in rows {
            if r >> n != 0 {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    len: 1 << n,
                });
            }
            mask.words[(r / 64) as usize] |= 1 << (r % 64);
        }
        mask.cardinality = mask.words.iter().map(|w| w.count_ones() as u64).sum();
        Ok(mask)
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, row: u64) -> bool {
        self.words[(row / 64) as usize] >> (row % 64) & 1 == 1
    }

    pub fn rows(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(i as u64 * 64 + b)
            })
        })
    }
}

/// Draws `Q` for trial `trial` of `params`.
pub fn sample_mask(params: &SamplingParams, trial: u64) -> Result<SampleMask> {
    let mut mask = SampleMask::empty(params.n)?;
    if params.p_hat == 0.0 {
        return Ok(mask);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(trial);
    let len = 1u64 << params.n;
    let scale = (-53f64).exp2();
    let mut count = 0;
    for j in 0..len {
        let u = (rng.next_u64() >> 11) as f64 * scale;
        if u < params.p_hat {
            mask.words[(j / 64) as usize] |= 1 << (j % 64);
            count += 1;
        }
    }
    mask.cardinality = count;
    Ok(mask)
}

//! Search for subspaces whose orthogonal complement avoids the sampled rows.
//!
//! We look for `W ∈ Gr(n, n-k)` with `span(W) ∩ Q = ∅` and report
//! `V = W^⊥`. The search builds the RREF basis of `W` one row at a time in
//! ascending pivot order, so each subspace is reached along exactly one path.
//!
//! Alongside the partial basis `S` it keeps the candidate set
//! `C = { x : (x + S) ∩ Q = ∅ }` as a bitset over `Z_2^n`. Adding a row `r`
//! shrinks it to `C ∩ (C + r)`, and any completion of `S` must lie inside the
//! current `C`, which drives the pruning.

use num_bigint::BigUint;

use crate::counting::gaussian_binomial;
use crate::error::{guard, Error, Result};
use crate::gf2::Subspace;
use crate::grassmannian::DEFAULT_BUDGET;

use super::sampling::SampleMask;

/// Largest `n - k` for which the complement span is searched.
pub const MAX_COMPLEMENT_DIM: u32 = 20;

/// Outcome of a witness search or count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    /// Some `V ∈ Gr(n,k)` with `Q ∩ V^⊥ = ∅`.
    pub witness: Option<Subspace>,
    /// Exact number of such `V`, when counted.
    pub exact_count: Option<BigUint>,
    pub nodes_explored: u64,
}

// Masks selecting the lower half of each 2^b-bit block.
const BLOCK_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Permutes bit positions of `x` by `i -> i ^ s` for `s < 64`.
#[inline]
fn xor_permute_word(mut x: u64, s: u64) -> u64 {
    for (b, &m) in BLOCK_MASKS.iter().enumerate() {
        if s >> b & 1 == 1 {
            let w = 1u32 << b;
            x = ((x & m) << w) | ((x >> w) & m);
        }
    }
    x
}

/// `out = a ∩ (a + r)`; returns the popcount of `out`.
fn intersect_shifted(a: &[u64], r: u64, out: &mut [u64]) -> u64 {
    let hi = (r >> 6) as usize;
    let lo = r & 63;
    let mut total = 0;
    for (i, o) in out.iter_mut().enumerate() {
        let v = a[i] & xor_permute_word(a[i ^ hi], lo);
        *o = v;
        total += v.count_ones() as u64;
    }
    total
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    First,
    Count,
}

struct Search {
    n: u32,
    m: u32,
    words: usize,
    mode: Mode,
    /// One candidate bitset per level, `words` apart.
    sets: Vec<u64>,
    cands: Vec<Vec<u64>>,
    rows: Vec<u64>,
    found: Option<Vec<u64>>,
    count: u64,
    nodes: u64,
}

impl Search {
    fn new(q: &SampleMask, m: u32, mode: Mode) -> Self {
        let n = q.exponent();
        let words = q.words().len();
        let mut sets = vec![0u64; words * (m as usize + 1)];
        let len_mask = if n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1 << n)) - 1
        };
        for (dst, &src) in sets[..words].iter_mut().zip(q.words()) {
            *dst = !src & len_mask;
        }
        Self {
            n,
            m,
            words,
            mode,
            sets,
            cands: vec![Vec::new(); m as usize + 1],
            rows: Vec::with_capacity(m as usize),
            found: None,
            count: 0,
            nodes: 0,
        }
    }

    fn run(&mut self) {
        // 0 lies in every subspace
        if self.sets[0] & 1 == 0 {
            return;
        }
        self.dfs(0, 0, 0);
    }

    /// `low` is `1 << (last pivot + 1)`; returns true to stop.
    fn dfs(&mut self, level: usize, low: u64, pivots: u64) -> bool {
        self.nodes += 1;
        let m = self.m as usize;
        if level == m {
            match self.mode {
                Mode::First => {
                    self.found = Some(self.rows.clone());
                    return true;
                }
                Mode::Count => {
                    self.count += 1;
                    return false;
                }
            }
        }
        let remaining = (m - level) as u32;
        // the next pivot must leave room for the rows after it
        let pivot_cap = 1u64 << (self.n - remaining + 1);
        let mut cands = std::mem::take(&mut self.cands[level]);
        cands.clear();
        let mut reduced = 0u64;
        {
            let set = &self.sets[level * self.words..(level + 1) * self.words];
            let first_word = (low / 64) as usize;
            for (wi, &word) in set.iter().enumerate().skip(first_word) {
                let mut w = word;
                while w != 0 {
                    let x = wi as u64 * 64 + w.trailing_zeros() as u64;
                    w &= w - 1;
                    if x < low.max(1) || x & pivots != 0 {
                        continue;
                    }
                    reduced += 1;
                    if x < pivot_cap {
                        cands.push(x);
                    }
                }
            }
        }
        // all nonzero combinations of the remaining rows are reduced members
        if reduced + 1 < 1u64 << remaining {
            self.cands[level] = cands;
            return false;
        }
        let need = 1u64 << self.m;
        let mut stop = false;
        for &r in &cands {
            let (head, tail) = self.sets.split_at_mut((level + 1) * self.words);
            let cur = &head[level * self.words..];
            let next = &mut tail[..self.words];
            if intersect_shifted(cur, r, next) < need {
                continue;
            }
            let top = 63 - r.leading_zeros();
            self.rows.push(r);
            stop = self.dfs(level + 1, 1u64 << (top + 1), pivots | 1 << top);
            self.rows.pop();
            if stop {
                break;
            }
        }
        self.cands[level] = cands;
        stop
    }
}

fn check_guards(q: &SampleMask, k: u32) -> Result<u32> {
    let n = q.exponent();
    if k > n {
        return Err(Error::SubspaceDimension { dim: k, n });
    }
    let m = n - k;
    if m > MAX_COMPLEMENT_DIM {
        return Err(guard("complement dimension n-k", m, MAX_COMPLEMENT_DIM));
    }
    Ok(m)
}

fn to_witness(n: u32, rows: &[u64]) -> Subspace {
    let mut basis = rows.to_vec();
    basis.reverse();
    Subspace::from_canonical_rows(n, basis).orthogonal_complement()
}

/// Finds some `V ∈ Gr(n,k)` with `Q ∩ V^⊥ = ∅`, or proves none exists.
///
/// The returned witness is the one whose complement comes first in the
/// search order, so the result is a deterministic function of `Q` and `k`.
pub fn find_kernel_witness(q: &SampleMask, k: u32) -> Result<WitnessReport> {
    let m = check_guards(q, k)?;
    let mut s = Search::new(q, m, Mode::First);
    s.run();
    Ok(WitnessReport {
        witness: s
            .found
            .as_deref()
            .map(|rows| to_witness(q.exponent(), rows)),
        exact_count: None,
        nodes_explored: s.nodes,
    })
}

/// Exact `X = #{V ∈ Gr(n,k) : Q ∩ V^⊥ = ∅}` under the default budget.
pub fn count_witnesses(q: &SampleMask, k: u32) -> Result<WitnessReport> {
    count_witnesses_with_budget(q, k, DEFAULT_BUDGET)
}

pub fn count_witnesses_with_budget(q: &SampleMask, k: u32, budget: u64) -> Result<WitnessReport> {
    let m = check_guards(q, k)?;
    let total = gaussian_binomial(q.exponent(), m)?;
    if total > BigUint::from(budget) {
        return Err(guard("Grassmannian subspaces", total, budget));
    }
    let mut s = Search::new(q, m, Mode::Count);
    s.run();
    Ok(WitnessReport {
        witness: None,
        exact_count: Some(BigUint::from(s.count)),
        nodes_explored: s.nodes,
    })
}

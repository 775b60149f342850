//! Exact counting for Grassmannians over GF(2).
//!
//! Everything in here runs on big integers. Logarithms only appear in
//! reported margins; every verdict is decided by an exact integer comparison.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{guard, Error, Result};
use crate::gf2::{EchelonBuilder, Subspace};
use crate::grassmannian::{Grassmannian, DEFAULT_BUDGET};

/// Exact nonnegative integer count.
pub type BigCount = BigUint;

/// Largest ambient dimension accepted by the counting paths.
pub const MAX_COUNT_DIM: u32 = 1024;

fn check_nd(n: u32, d: u32) -> Result<()> {
    if n > MAX_COUNT_DIM {
        return Err(Error::AmbientDimension {
            n,
            max: MAX_COUNT_DIM,
        });
    }
    if d > n {
        return Err(Error::SubspaceDimension { dim: d, n });
    }
    Ok(())
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// `|Gr(n,d)| = prod_{i<d} (2^n - 2^i) / (2^d - 2^i)`.
///
/// All numerators are multiplied first and the product of denominators is
/// divided out once; the division is exact.
pub fn gaussian_binomial(n: u32, d: u32) -> Result<BigCount> {
    check_nd(n, d)?;
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        num *= pow2(n as u64) - pow2(i as u64);
        den *= pow2(d as u64) - pow2(i as u64);
    }
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// `(2^{d(n-d)}, 2^{d(n-d+1)})`, which strictly bracket `|Gr(n,d)|` for
/// `0 < d < n`.
pub fn grassmannian_bounds(n: u32, d: u32) -> Result<(BigCount, BigCount)> {
    check_nd(n, d)?;
    if d == 0 || d == n {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: format!("bounds are strict only for 0 < d < n (got d={d}, n={n})"),
        });
    }
    let (n, d) = (n as u64, d as u64);
    Ok((pow2(d * (n - d)), pow2(d * (n - d + 1))))
}

/// Range `[max(n-2k, 0), n-k]` of `dim(U^⊥ ∩ V^⊥)` over `U, V ∈ Gr(n,k)`.
pub fn intersection_dim_range(n: u32, k: u32) -> Result<(u32, u32)> {
    if k > n {
        return Err(Error::SubspaceDimension { dim: k, n });
    }
    Ok((n.saturating_sub(2 * k), n - k))
}

/// Base-2 logarithm of a big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

/// Natural logarithm of a big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    log2_big(x) * std::f64::consts::LN_2
}

/// How a [`PairCountTable`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairCountMethod {
    /// All ordered pairs of `Gr(n,k)`.
    Exhaustive,
    /// One fixed `U_0`, all `V`, scaled by `|Gr(n,k)|` (transitivity of GL_n).
    FixedU,
    /// Counting subspaces by their intersection with a fixed subspace.
    Structural,
}

/// Exact counts `T(n,k,d)` of ordered pairs `(U, V) ∈ Gr(n,k)^2` with
/// `dim(U^⊥ ∩ V^⊥) = d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCountTable {
    pub n: u32,
    pub k: u32,
    pub counts: BTreeMap<u32, BigCount>,
    pub method: PairCountMethod,
}

impl PairCountTable {
    pub fn get(&self, d: u32) -> Option<&BigCount> {
        self.counts.get(&d)
    }

    pub fn total(&self) -> BigCount {
        self.counts.values().sum()
    }

    /// Support lies in the intersection range and counts sum to `|Gr(n,k)|^2`.
    pub fn check_invariants(&self) -> Result<()> {
        let (lo, hi) = intersection_dim_range(self.n, self.k)?;
        if let Some(d) = self.counts.keys().find(|&&d| d < lo || d > hi) {
            return Err(Error::Precondition(format!(
                "T({},{},{d}) outside [{lo}, {hi}]",
                self.n, self.k
            )));
        }
        let g = gaussian_binomial(self.n, self.k)?;
        if self.total() != &g * &g {
            return Err(Error::Precondition(format!(
                "pair counts for ({}, {}) do not sum to |Gr|^2",
                self.n, self.k
            )));
        }
        Ok(())
    }
}

fn to_u64_or_guard(x: &BigUint, what: &'static str, budget: u64) -> Result<u64> {
    match x.to_u64() {
        Some(v) if v <= budget => Ok(v),
        _ => Err(guard(what, x, budget)),
    }
}

fn intersection_dim(a: &Subspace, b: &Subspace) -> u32 {
    let mut sum = EchelonBuilder::new();
    for &w in a.basis_words().iter().chain(b.basis_words()) {
        sum.insert(w);
    }
    a.dim() + b.dim() - sum.rank()
}

/// Pair counts, picking the cheapest exact method that fits `DEFAULT_BUDGET`.
pub fn pair_count_table(n: u32, k: u32) -> Result<PairCountTable> {
    let g = gaussian_binomial(n, k)?;
    let budget = BigUint::from(DEFAULT_BUDGET);
    let method = if &g * &g <= budget {
        PairCountMethod::Exhaustive
    } else if g <= budget {
        PairCountMethod::FixedU
    } else {
        PairCountMethod::Structural
    };
    pair_count_table_with(n, k, method, DEFAULT_BUDGET)
}

/// Pair counts by an explicitly chosen method. The enumeration methods refuse
/// to run when their work exceeds `budget`.
pub fn pair_count_table_with(
    n: u32,
    k: u32,
    method: PairCountMethod,
    budget: u64,
) -> Result<PairCountTable> {
    let g = gaussian_binomial(n, k)?;
    let mut counts: BTreeMap<u32, BigCount> = BTreeMap::new();
    match method {
        PairCountMethod::Exhaustive => {
            to_u64_or_guard(&(&g * &g), "ordered subspace pairs", budget)?;
            let complements: Vec<Subspace> = Grassmannian::with_budget(n, k, budget)?
                .map(|u| u.orthogonal_complement())
                .collect();
            let mut raw = vec![0u64; (n + 1) as usize];
            for a in &complements {
                for b in &complements {
                    raw[intersection_dim(a, b) as usize] += 1;
                }
            }
            for (d, c) in raw.into_iter().enumerate() {
                if c > 0 {
                    counts.insert(d as u32, BigUint::from(c));
                }
            }
        }
        PairCountMethod::FixedU => {
            to_u64_or_guard(&g, "subspaces for fixed-U pair count", budget)?;
            let fixed = Subspace::coordinate(n, k)?.orthogonal_complement();
            let mut raw = vec![0u64; (n + 1) as usize];
            for v in Grassmannian::with_budget(n, k, budget)? {
                raw[intersection_dim(&fixed, &v.orthogonal_complement()) as usize] += 1;
            }
            for (d, c) in raw.into_iter().enumerate() {
                if c > 0 {
                    counts.insert(d as u32, &g * c);
                }
            }
        }
        PairCountMethod::Structural => {
            let (lo, hi) = intersection_dim_range(n, k)?;
            let m = n - k;
            for d in lo..=hi {
                let c = subspaces_meeting_fixed(n, m, m, d)?;
                if !c.is_zero() {
                    counts.insert(d, &g * c);
                }
            }
        }
    }
    Ok(PairCountTable {
        n,
        k,
        counts,
        method,
    })
}

/// Number of `m`-dimensional subspaces of `Z_2^n` meeting a fixed
/// `a`-dimensional subspace in exactly dimension `d`:
/// `2^{(a-d)(m-d)} |Gr(a,d)| |Gr(n-a, m-d)|`.
pub fn subspaces_meeting_fixed(n: u32, a: u32, m: u32, d: u32) -> Result<BigCount> {
    check_nd(n, a)?;
    check_nd(n, m)?;
    if d > a || d > m || m - d > n - a {
        return Ok(BigUint::zero());
    }
    let shift = ((a - d) as u64) * ((m - d) as u64);
    Ok((gaussian_binomial(a, d)? * gaussian_binomial(n - a, m - d)?) << shift)
}

/// `|Gr(n,d)| * |Gr(n-d, n-k-d)|^2`, the upper bound on `T(n,k,d)` obtained by
/// first choosing the intersection and then two subspaces of the quotient.
pub fn t_upper_bound(n: u32, k: u32, d: u32) -> Result<BigCount> {
    let (lo, hi) = intersection_dim_range(n, k)?;
    check_nd(n, d)?;
    if d < lo || d > hi {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: format!("{d} outside intersection range [{lo}, {hi}] for n={n}, k={k}"),
        });
    }
    let q = gaussian_binomial(n - d, n - k - d)?;
    Ok(gaussian_binomial(n, d)? * &q * &q)
}

/// Whether `min(k, n-k) >= 12 log2 n`.
pub fn proof_hypothesis(n: u32, k: u32) -> (bool, f64) {
    let need = 12.0 * (n as f64).log2();
    let have = k.min(n.saturating_sub(k)) as f64;
    (have >= need, have - need)
}

/// One row of a [`TBoundReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TBoundRow {
    pub d: u32,
    /// `log2(t_upper_bound / |Gr(n,k)|^2)`.
    pub log2_ratio: f64,
    /// `-k(n-k)/2`.
    pub log2_threshold: f64,
    /// `log2_threshold - log2_ratio`; nonnegative when the bound holds.
    pub margin: f64,
    /// Exact integer verdict.
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TBoundReport {
    pub n: u32,
    pub k: u32,
    pub hypothesis_holds: bool,
    /// `min(k, n-k) - 12 log2 n`.
    pub hypothesis_margin: f64,
    pub rows: Vec<TBoundRow>,
    pub verdict: Verdict,
}

/// Checks `t_upper_bound(n,k,d) / |Gr(n,k)|^2 <= 2^{-k(n-k)/2}` for every
/// integer `d` in `[n - k - 3 log2 n, n - k]`.
///
/// The comparison is done as `t^2 * 2^{k(n-k)} <= |Gr|^4` so odd `k(n-k)`
/// needs no rounding.
pub fn t_bound_claim_check(n: u32, k: u32) -> Result<TBoundReport> {
    check_nd(n, k)?;
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "need n >= 2".into(),
        });
    }
    let (hypothesis_holds, hypothesis_margin) = proof_hypothesis(n, k);
    let (lo, hi) = intersection_dim_range(n, k)?;
    let start = ((n - k) as f64 - 3.0 * (n as f64).log2())
        .ceil()
        .max(lo as f64) as u32;
    let g = gaussian_binomial(n, k)?;
    let g2 = &g * &g;
    let g4 = &g2 * &g2;
    let log2_g2 = log2_big(&g2);
    let kk = (k as u64) * ((n - k) as u64);
    let log2_threshold = -(kk as f64) / 2.0;

    let mut rows = Vec::new();
    for d in start..=hi {
        let t = t_upper_bound(n, k, d)?;
        let holds = (&t * &t) << kk <= g4;
        let log2_ratio = log2_big(&t) - log2_g2;
        rows.push(TBoundRow {
            d,
            log2_ratio,
            log2_threshold,
            margin: log2_threshold - log2_ratio,
            holds,
        });
    }
    let verdict = if !hypothesis_holds {
        Verdict::NotApplicable
    } else if rows.iter().all(|r| r.holds) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(TBoundReport {
        n,
        k,
        hypothesis_holds,
        hypothesis_margin,
        rows,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    /// Distinct spans of all pairs of nonzero vectors, by brute force.
    fn brute_force_planes(n: u32) -> usize {
        let mut seen = BTreeSet::new();
        for a in 1..1u64 << n {
            for b in 1..1u64 << n {
                let s = Subspace::from_words(n, [a, b]).unwrap();
                if s.dim() == 2 {
                    seen.insert(s);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(gaussian_binomial(2, 1).unwrap(), big(3));
        assert_eq!(brute_force_planes(4), 35);
        assert_eq!(gaussian_binomial(4, 2).unwrap(), big(35));
        for n in 0..8 {
            assert_eq!(gaussian_binomial(n, 0).unwrap(), big(1));
        }
        assert!(gaussian_binomial(3, 4).is_err());
        assert!(gaussian_binomial(1025, 1).is_err());
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(grassmannian_bounds(4, 2).unwrap(), (big(16), big(64)));
        assert_eq!(grassmannian_bounds(2, 1).unwrap(), (big(2), big(4)));
        let (lo, hi) = grassmannian_bounds(10, 5).unwrap();
        assert_eq!((lo.clone(), hi.clone()), (big(1 << 25), big(1 << 30)));
        let g = gaussian_binomial(10, 5).unwrap();
        assert!(lo < g && g < hi);
        assert!(grassmannian_bounds(4, 0).is_err());
        assert!(grassmannian_bounds(4, 4).is_err());
    }

    #[test]
    fn intersection_range_examples() {
        assert_eq!(intersection_dim_range(6, 2).unwrap(), (2, 4));
        assert_eq!(intersection_dim_range(4, 2).unwrap(), (0, 2));
        assert_eq!(intersection_dim_range(3, 3).unwrap(), (0, 0));
    }

    #[test]
    fn pair_count_examples() {
        let t = pair_count_table(3, 3).unwrap();
        assert_eq!(t.counts, BTreeMap::from([(0, big(1))]));

        let t = pair_count_table(2, 1).unwrap();
        assert_eq!(t.counts, BTreeMap::from([(0, big(6)), (1, big(3))]));

        let t = pair_count_table(4, 2).unwrap();
        assert_eq!(t.total(), big(1225));
        t.check_invariants().unwrap();
    }

    #[test]
    fn pair_count_methods_agree() {
        for n in 1..=6 {
            for k in 0..=n {
                let ex = pair_count_table_with(n, k, PairCountMethod::Exhaustive, DEFAULT_BUDGET)
                    .unwrap();
                let fu =
                    pair_count_table_with(n, k, PairCountMethod::FixedU, DEFAULT_BUDGET).unwrap();
                let st = pair_count_table_with(n, k, PairCountMethod::Structural, DEFAULT_BUDGET)
                    .unwrap();
                assert_eq!(ex.counts, fu.counts, "n={n} k={k}");
                assert_eq!(ex.counts, st.counts, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn exhaustive_pair_count_respects_budget() {
        let err = pair_count_table_with(8, 4, PairCountMethod::Exhaustive, 1000).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { .. }));
    }

    #[test]
    fn t_upper_bound_examples() {
        assert_eq!(t_upper_bound(2, 1, 1).unwrap(), big(3));
        assert_eq!(t_upper_bound(4, 2, 2).unwrap(), big(35));
        assert_eq!(t_upper_bound(4, 2, 0).unwrap(), big(1225));
        let table = pair_count_table(4, 2).unwrap();
        for (&d, c) in &table.counts {
            assert!(c <= &t_upper_bound(4, 2, d).unwrap());
        }
        assert!(t_upper_bound(6, 2, 1).is_err());
        assert!(t_upper_bound(6, 2, 5).is_err());
    }

    #[test]
    fn log2_big_matches_float() {
        for x in [1u64, 2, 3, 1000, u64::MAX] {
            assert!((log2_big(&big(x)) - (x as f64).log2()).abs() < 1e-12);
        }
        let x = BigUint::from(3u32) << 1000u32;
        assert!((log2_big(&x) - (1000.0 + 3f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn t_bound_not_applicable_below_hypothesis() {
        let r = t_bound_claim_check(64, 32).unwrap();
        assert!(!r.hypothesis_holds);
        assert_eq!(r.verdict, Verdict::NotApplicable);
    }
}

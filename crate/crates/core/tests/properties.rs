use std::collections::BTreeSet;

use num_bigint::BigUint;
use proptest::prelude::*;

use hadamard_kernel::counting::{gaussian_binomial, intersection_dim_range};
use hadamard_kernel::experiment::{
    count_witnesses, find_kernel_witness, sample_mask, SampleMask, SamplingParams,
};
use hadamard_kernel::gf2::{Gf2Vector, Subspace};
use hadamard_kernel::grassmannian::enumerate_grassmannian;
use hadamard_kernel::transform::{fwht, verify_ortho_lemma, DenseVector};

fn subspace(max_n: u32) -> impl Strategy<Value = Subspace> {
    (1..=max_n).prop_flat_map(|n| {
        let m = (1u64 << n) - 1;
        prop::collection::vec(any::<u64>().prop_map(move |w| w & m), 0..=n as usize)
            .prop_map(move |words| Subspace::from_words(n, words).unwrap())
    })
}

fn subspace_pair(max_n: u32) -> impl Strategy<Value = (Subspace, Subspace)> {
    (1..=max_n).prop_flat_map(|n| {
        let m = (1u64 << n) - 1;
        let words = || prop::collection::vec(any::<u64>().prop_map(move |w| w & m), 0..=n as usize);
        (words(), words()).prop_map(move |(a, b)| {
            (
                Subspace::from_words(n, a).unwrap(),
                Subspace::from_words(n, b).unwrap(),
            )
        })
    })
}

fn brute_count(q: &SampleMask, k: u32) -> u64 {
    enumerate_grassmannian(q.exponent(), k)
        .unwrap()
        .filter(|v| {
            v.orthogonal_complement()
                .span_words()
                .unwrap()
                .iter()
                .all(|&x| !q.contains(x))
        })
        .count() as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_is_a_set_invariant(v in subspace(10), mix in any::<u64>()) {
        let n = v.ambient_dim();
        let span = v.span_words().unwrap();
        prop_assert_eq!(&Subspace::from_words(n, span.iter().copied()).unwrap(), &v);
        // elementary row operations on a basis leave the span unchanged
        let basis = v.basis_words().to_vec();
        let mut other: Vec<u64> = basis.clone();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i != j && (mix >> ((i * 7 + j) % 64)) & 1 == 1 {
                    other[i] ^= other[j];
                }
            }
        }
        other.push(0);
        prop_assert_eq!(Subspace::from_words(n, other).unwrap(), v);
    }

    #[test]
    fn complement_is_an_involution(v in subspace(12)) {
        let n = v.ambient_dim();
        let c = v.orthogonal_complement();
        prop_assert_eq!(c.dim() + v.dim(), n);
        prop_assert_eq!(c.orthogonal_complement(), v.clone());
        for &a in v.basis_words() {
            for &b in c.basis_words() {
                let (a, b) = (Gf2Vector::new(a, n).unwrap(), Gf2Vector::new(b, n).unwrap());
                prop_assert_eq!(a.dot(b).unwrap(), 0);
            }
        }
    }

    #[test]
    fn sum_and_intersection_match_sets((u, v) in subspace_pair(5)) {
        let su: BTreeSet<u64> = u.span_words().unwrap().into_iter().collect();
        let sv: BTreeSet<u64> = v.span_words().unwrap().into_iter().collect();
        let meet = u.intersect(&v).unwrap();
        let meet_set: BTreeSet<u64> = meet.span_words().unwrap().into_iter().collect();
        prop_assert_eq!(&meet_set, &su.intersection(&sv).copied().collect::<BTreeSet<u64>>());
        let join = u.sum(&v).unwrap();
        prop_assert_eq!(join.dim() + meet.dim(), u.dim() + v.dim());
    }

    #[test]
    fn complement_intersection_in_range(n in 1u32..=6, k_frac in 0.0f64..=1.0, a in any::<u64>(), b in any::<u64>()) {
        let k = (k_frac * n as f64).round() as u32;
        let all: Vec<Subspace> = enumerate_grassmannian(n, k).unwrap().collect();
        let u = &all[(a % all.len() as u64) as usize];
        let v = &all[(b % all.len() as u64) as usize];
        let d = u.orthogonal_complement().intersect(&v.orthogonal_complement()).unwrap().dim();
        let (lo, hi) = intersection_dim_range(n, k).unwrap();
        prop_assert!(lo <= d && d <= hi, "d={} not in [{}, {}]", d, lo, hi);
    }

    #[test]
    fn fwht_is_orthonormal_involution(n in 0u32..=12, seed in any::<u64>()) {
        let len = 1usize << n;
        let mut s = seed | 1;
        let entries: Vec<f64> = (0..len)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        let x = DenseVector::from_vec(entries).unwrap();
        let hx = fwht(&x);
        prop_assert!((hx.norm() - x.norm()).abs() <= 1e-12 * x.norm().max(1.0));
        prop_assert!(fwht(&hx).sup_distance(&x) < 1e-12);
    }

    #[test]
    fn gaussian_binomial_symmetry_and_pascal(n in 1u32..=64, d_frac in 0.0f64..=1.0) {
        let d = (d_frac * n as f64).round() as u32;
        prop_assert_eq!(gaussian_binomial(n, d).unwrap(), gaussian_binomial(n, n - d).unwrap());
        if d > 0 && d < n {
            let rhs = gaussian_binomial(n - 1, d - 1).unwrap()
                + (gaussian_binomial(n - 1, d).unwrap() << d);
            prop_assert_eq!(gaussian_binomial(n, d).unwrap(), rhs);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn exact_count_agrees_with_search(n in 1u32..=6, k_frac in 0.0f64..=1.0, rows in any::<u64>(), density in 0u32..4) {
        let k = (k_frac * n as f64).round() as u32;
        let len = 1u64 << n;
        // sparser masks for higher density codes
        let mut bits = rows;
        for _ in 0..density {
            bits &= rows.rotate_left(17 + density);
        }
        let q = SampleMask::from_rows(n, (0..len).filter(|&j| (bits >> j) & 1 == 1)).unwrap();
        let count = count_witnesses(&q, k).unwrap().exact_count.unwrap();
        let found = find_kernel_witness(&q, k).unwrap().witness;
        prop_assert_eq!(count > BigUint::from(0u32), found.is_some());
        prop_assert_eq!(count, BigUint::from(brute_count(&q, k)));
        if let Some(v) = found {
            prop_assert_eq!(v.dim(), k);
            for x in v.orthogonal_complement().span_words().unwrap() {
                prop_assert!(!q.contains(x));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ortho_lemma_random_large(v in subspace(16).prop_filter("n >= 12", |v| v.ambient_dim() >= 12)) {
        prop_assert!(verify_ortho_lemma(&v).unwrap() < 1e-10);
    }

    #[test]
    fn sampling_is_a_function_of_seed_and_trial(seed in any::<u64>(), trial in any::<u64>()) {
        let p = SamplingParams::new(8, 4, 0.2, 0.1, seed).unwrap();
        prop_assert_eq!(sample_mask(&p, trial).unwrap(), sample_mask(&p, trial).unwrap());
    }
}

#[test]
fn ortho_lemma_exhaustive_small() {
    for n in 1..=6 {
        for d in 0..=n {
            for v in enumerate_grassmannian(n, d).unwrap() {
                assert!(verify_ortho_lemma(&v).unwrap() < 1e-10, "n={n} V={v:?}");
            }
        }
    }
}

#[test]
fn complement_is_a_bijection_between_grassmannians() {
    for n in 1..=5 {
        for d in 0..=n {
            let images: BTreeSet<Subspace> = enumerate_grassmannian(n, d)
                .unwrap()
                .map(|v| v.orthogonal_complement())
                .collect();
            let target: BTreeSet<Subspace> = enumerate_grassmannian(n, n - d).unwrap().collect();
            assert_eq!(images, target, "n={n} d={d}");
        }
    }
}

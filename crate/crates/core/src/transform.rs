//! The `2^n x 2^n` Hadamard matrix on `Z_2^n` and its fast transform.

use crate::error::{guard, Error, Result};
use crate::gf2::{parity, Subspace};

/// Largest exponent for which dense vectors are allocated.
pub const MAX_DENSE_DIM: u32 = 24;

/// Length-`2^n` real vector indexed by elements of `Z_2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    n: u32,
    entries: Vec<f64>,
}

impl DenseVector {
    pub fn zeros(n: u32) -> Result<Self> {
        if n > MAX_DENSE_DIM {
            return Err(guard("dense vector exponent", n, MAX_DENSE_DIM));
        }
        Ok(Self {
            n,
            entries: vec![0.0; 1 << n],
        })
    }

    /// Wraps `entries`, whose length must be a power of two.
    pub fn from_vec(entries: Vec<f64>) -> Result<Self> {
        let len = entries.len();
        if !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros();
        if n > MAX_DENSE_DIM {
            return Err(guard("dense vector exponent", n, MAX_DENSE_DIM));
        }
        Ok(Self { n, entries })
    }

    pub fn unit(n: u32, index: usize) -> Result<Self> {
        let mut v = Self::zeros(n)?;
        if index >= v.len() {
            return Err(Error::IndexOutOfRange {
                index: index as u64,
                len: v.len() as u64,
            });
        }
        v.entries[index] = 1.0;
        Ok(v)
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Indices of nonzero entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

/// `H_{ij} = (-1)^{<i, j>} / sqrt(2^n)`.
pub fn hadamard_entry(i: u64, j: u64, n: u32) -> Result<f64> {
    if n > 63 {
        return Err(Error::AmbientDimension { n, max: 63 });
    }
    let len = 1u64 << n;
    for idx in [i, j] {
        if idx >= len {
            return Err(Error::IndexOutOfRange { index: idx, len });
        }
    }
    let scale = (-(n as f64) / 2.0).exp2();
    Ok(if parity(i & j) == 1 { -scale } else { scale })
}

/// In-place unnormalized Walsh–Hadamard butterfly followed by one
/// `2^{-n/2}` scaling pass.
pub fn fwht_in_place(data: &mut [f64]) -> Result<()> {
    let len = data.len();
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let n = len.trailing_zeros();
    if n > MAX_DENSE_DIM {
        return Err(guard("transform exponent", n, MAX_DENSE_DIM));
    }
    let mut half = 1;
    while half < len {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
    let scale = (-(n as f64) / 2.0).exp2();
    for x in data.iter_mut() {
        *x *= scale;
    }
    Ok(())
}

/// `H v`.
pub fn fwht(v: &DenseVector) -> DenseVector {
    let mut out = v.clone();
    fwht_in_place(&mut out.entries).expect("DenseVector length is a guarded power of two");
    out
}

/// Unit-norm indicator of `V`: `2^{-dim/2}` on each element of `V`.
pub fn indicator_vector(v: &Subspace) -> Result<DenseVector> {
    let mut out = DenseVector::zeros(v.ambient_dim())?;
    let value = (-(v.dim() as f64) / 2.0).exp2();
    for x in v.span_words()? {
        out.entries[x as usize] = value;
    }
    Ok(out)
}

/// Sup-norm distance between `H 1_V` and `1_{V^⊥}`.
pub fn verify_ortho_lemma(v: &Subspace) -> Result<f64> {
    if v.ambient_dim() > 20 {
        return Err(guard("orthogonality check exponent", v.ambient_dim(), 20));
    }
    let lhs = fwht(&indicator_vector(v)?);
    let rhs = indicator_vector(&v.orthogonal_complement())?;
    Ok(lhs.sup_distance(&rhs))
}

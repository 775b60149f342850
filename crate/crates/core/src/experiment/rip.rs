//! Kernel certificates and the failure of injectivity on sparse vectors.

use crate::error::{Error, Result};
use crate::gf2::Subspace;
use crate::transform::{fwht, indicator_vector, DenseVector};

use super::sampling::SampleMask;

fn check_ambient(q: &SampleMask, v: &Subspace) -> Result<()> {
    if q.exponent() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: q.exponent(),
            right: v.ambient_dim(),
        });
    }
    Ok(())
}

/// Largest `|(H x)_j|` over sampled rows `j`; 0 when `Q` is empty.
pub fn sampled_residual(q: &SampleMask, x: &DenseVector) -> Result<f64> {
    if q.exponent() != x.exponent() {
        return Err(Error::DimensionMismatch {
            left: q.exponent(),
            right: x.exponent(),
        });
    }
    let hx = fwht(x);
    Ok(q.rows()
        .map(|j| hx.entries()[j as usize].abs())
        .fold(0.0, f64::max))
}

/// Checks that `1_V` lies in the kernel of the sampled rows.
///
/// Disjointness of `Q` and `V^⊥` is checked exactly first; the returned
/// value is the floating-point residual `max_{j ∈ Q} |(H 1_V)_j|`.
pub fn verify_kernel(q: &SampleMask, v: &Subspace) -> Result<f64> {
    check_ambient(q, v)?;
    let complement = v.orthogonal_complement();
    if let Some(row) = complement
        .span_words()?
        .into_iter()
        .find(|&x| q.contains(x))
    {
        return Err(Error::WitnessInvalid { row });
    }
    sampled_residual(q, &indicator_vector(v)?)
}

/// Splits `x = 1_V` for `V ∈ Gr(n, k+1)` into `x = y - z` with `y`, `z` both
/// `2^k`-sparse and disjointly supported: `y` keeps the lower half of the
/// support in index order, `z` holds the negated upper half.
///
/// When `1_V` is in the kernel of `H_Q` this gives `H_Q y = H_Q z` with
/// `y != z`.
pub fn non_injectivity_pair(v: &Subspace, k: u32) -> Result<(DenseVector, DenseVector)> {
    if v.dim() != k + 1 {
        return Err(Error::SubspaceDimension {
            dim: v.dim(),
            n: v.ambient_dim(),
        });
    }
    let x = indicator_vector(v)?;
    let support = x.support();
    let half = support.len() / 2;
    let mut y = DenseVector::zeros(x.exponent())?;
    let mut z = DenseVector::zeros(x.exponent())?;
    for (rank, &i) in support.iter().enumerate() {
        if rank < half {
            y.entries_mut()[i] = x.entries()[i];
        } else {
            z.entries_mut()[i] = -x.entries()[i];
        }
    }
    Ok((y, z))
}

/// `max_{j ∈ Q} |(H y)_j - (H z)_j|`.
pub fn pair_residual(q: &SampleMask, y: &DenseVector, z: &DenseVector) -> Result<f64> {
    if q.exponent() != y.exponent() || y.exponent() != z.exponent() {
        return Err(Error::DimensionMismatch {
            left: y.exponent(),
            right: z.exponent(),
        });
    }
    let (hy, hz) = (fwht(y), fwht(z));
    Ok(q.rows()
        .map(|j| (hy.entries()[j as usize] - hz.entries()[j as usize]).abs())
        .fold(0.0, f64::max))
}

//! Bit-packed linear algebra over GF(2).
//!
//! An element of `Z_2^n` is stored as a machine word. Integer `i` maps to the
//! vector whose coordinate `j` is bit `j` of `i`, so the same word serves as a
//! row or column index of the Hadamard matrix.
//!
//! Subspaces are kept in reduced row echelon form with the highest set bit of
//! each row as its pivot and rows sorted by descending pivot. That form is
//! unique, so structural equality of two [`Subspace`] values is set equality.

use std::fmt;

use crate::error::{Error, Result};

/// Largest ambient dimension supported by element-indexed operations.
pub const MAX_AMBIENT_DIM: u32 = 63;

/// Largest subspace dimension [`Subspace::span_elements`] will materialize.
pub const MAX_SPAN_DIM: u32 = 30;

fn check_ambient(n: u32) -> Result<()> {
    if n == 0 || n > MAX_AMBIENT_DIM {
        return Err(Error::AmbientDimension {
            n,
            max: MAX_AMBIENT_DIM,
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
pub(crate) fn parity(x: u64) -> u8 {
    (x.count_ones() & 1) as u8
}

#[inline]
fn high_bit(x: u64) -> u32 {
    63 - x.leading_zeros()
}

/// An element of `Z_2^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    bits: u64,
    n: u32,
}

impl Gf2Vector {
    pub fn new(bits: u64, n: u32) -> Result<Self> {
        check_ambient(n)?;
        if bits & !mask(n) != 0 {
            return Err(Error::VectorOutOfRange { bits, n });
        }
        Ok(Self { bits, n })
    }

    pub fn zero(n: u32) -> Result<Self> {
        Self::new(0, n)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn ambient_dim(self) -> u32 {
        self.n
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Inner product `<a, b>` over GF(2): parity of `popcount(a & b)`.
    pub fn dot(self, other: Self) -> Result<u8> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(parity(self.bits & other.bits))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(Self {
            bits: self.bits ^ other.bits,
            n: self.n,
        })
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.n as usize)
    }
}

/// Incremental fully-reduced echelon basis, indexed by pivot position.
#[derive(Clone)]
pub(crate) struct EchelonBuilder {
    rows: [u64; 64],
    pivots: u64,
}

impl EchelonBuilder {
    pub(crate) fn new() -> Self {
        Self {
            rows: [0; 64],
            pivots: 0,
        }
    }

    pub(crate) fn reduce(&self, mut x: u64) -> u64 {
        let mut hits = x & self.pivots;
        while hits != 0 {
            let p = high_bit(hits);
            x ^= self.rows[p as usize];
            hits = x & self.pivots & mask(p);
        }
        x
    }

    /// Adds `x` to the span; returns false if it was already dependent.
    pub(crate) fn insert(&mut self, x: u64) -> bool {
        let x = self.reduce(x);
        if x == 0 {
            return false;
        }
        let q = high_bit(x);
        let mut others = self.pivots;
        while others != 0 {
            let p = others.trailing_zeros();
            others &= others - 1;
            if self.rows[p as usize] >> q & 1 == 1 {
                self.rows[p as usize] ^= x;
            }
        }
        self.rows[q as usize] = x;
        self.pivots |= 1 << q;
        true
    }

    pub(crate) fn rank(&self) -> u32 {
        self.pivots.count_ones()
    }

    pub(crate) fn into_rows(self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.rank() as usize);
        let mut p = self.pivots;
        while p != 0 {
            let q = high_bit(p);
            p &= !(1 << q);
            out.push(self.rows[q as usize]);
        }
        out
    }
}

/// A linear subspace of `Z_2^n` in canonical RREF.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: u32,
    basis: Vec<u64>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(n={}, [", self.n)?;
        for (i, row) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:0width$b}", row, width = self.n as usize)?;
        }
        write!(f, "])")
    }
}

impl Subspace {
    pub fn zero(n: u32) -> Result<Self> {
        check_ambient(n)?;
        Ok(Self {
            n,
            basis: Vec::new(),
        })
    }

    pub fn full(n: u32) -> Result<Self> {
        check_ambient(n)?;
        Ok(Self {
            n,
            basis: (0..n).rev().map(|j| 1u64 << j).collect(),
        })
    }

    /// Span of the first `d` standard basis vectors `e_0 .. e_{d-1}`.
    pub fn coordinate(n: u32, d: u32) -> Result<Self> {
        check_ambient(n)?;
        if d > n {
            return Err(Error::SubspaceDimension { dim: d, n });
        }
        Ok(Self {
            n,
            basis: (0..d).rev().map(|j| 1u64 << j).collect(),
        })
    }

    /// The canonical subspace spanned by `vectors`. Empty input gives the
    /// zero subspace of dimension `n`.
    pub fn canonicalize(n: u32, vectors: &[Gf2Vector]) -> Result<Self> {
        check_ambient(n)?;
        for v in vectors {
            if v.n != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: v.n,
                });
            }
        }
        Self::from_words(n, vectors.iter().map(|v| v.bits))
    }

    /// Like [`Subspace::canonicalize`] but takes raw words.
    pub fn from_words(n: u32, words: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_ambient(n)?;
        let mut builder = EchelonBuilder::new();
        for w in words {
            if w & !mask(n) != 0 {
                return Err(Error::VectorOutOfRange { bits: w, n });
            }
            builder.insert(w);
        }
        Ok(Self {
            n,
            basis: builder.into_rows(),
        })
    }

    /// Builds from rows the caller guarantees are already canonical.
    pub(crate) fn from_canonical_rows(n: u32, basis: Vec<u64>) -> Self {
        debug_assert!(is_canonical(&basis));
        Self { n, basis }
    }

    #[inline]
    pub fn ambient_dim(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.basis.len() as u32
    }

    /// Basis rows as raw words, descending pivot order.
    pub fn basis_words(&self) -> &[u64] {
        &self.basis
    }

    pub fn basis(&self) -> Vec<Gf2Vector> {
        self.basis
            .iter()
            .map(|&bits| Gf2Vector { bits, n: self.n })
            .collect()
    }

    /// Bitmask of pivot positions.
    pub fn pivot_mask(&self) -> u64 {
        self.basis.iter().fold(0, |m, &r| m | 1 << high_bit(r))
    }

    pub fn contains_word(&self, x: u64) -> bool {
        let mut x = x;
        for &row in &self.basis {
            if x >> high_bit(row) & 1 == 1 {
                x ^= row;
            }
        }
        x == 0
    }

    pub fn contains(&self, v: Gf2Vector) -> bool {
        v.n == self.n && self.contains_word(v.bits)
    }

    /// All `2^dim` elements as raw words, in Gray-code order starting at 0.
    pub fn span_words(&self) -> Result<Vec<u64>> {
        if self.dim() > MAX_SPAN_DIM {
            return Err(crate::error::guard(
                "span elements",
                format!("2^{}", self.dim()),
                format!("2^{MAX_SPAN_DIM}"),
            ));
        }
        let size = 1usize << self.dim();
        let mut out = Vec::with_capacity(size);
        let mut x = 0u64;
        out.push(x);
        for i in 1..size {
            x ^= self.basis[i.trailing_zeros() as usize];
            out.push(x);
        }
        Ok(out)
    }

    pub fn span_elements(&self) -> Result<Vec<Gf2Vector>> {
        Ok(self
            .span_words()?
            .into_iter()
            .map(|bits| Gf2Vector { bits, n: self.n })
            .collect())
    }

    /// `V^⊥ = { w : <v, w> = 0 for all v in V }`, of dimension `n - dim`.
    pub fn orthogonal_complement(&self) -> Self {
        let pivots = self.pivot_mask();
        let mut free = mask(self.n) & !pivots;
        let mut rows = Vec::with_capacity((self.n - self.dim()) as usize);
        while free != 0 {
            let f = free.trailing_zeros();
            free &= free - 1;
            let mut w = 1u64 << f;
            for &row in &self.basis {
                if row >> f & 1 == 1 {
                    w |= 1 << high_bit(row);
                }
            }
            rows.push(w);
        }
        Self::from_words(self.n, rows).expect("complement rows stay within ambient dimension")
    }

    /// Span of `self ∪ other`.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        Self::from_words(self.n, self.basis.iter().chain(&other.basis).copied())
    }

    /// `self ∩ other`, computed as `(self^⊥ + other^⊥)^⊥`.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        let joined = self
            .orthogonal_complement()
            .sum(&other.orthogonal_complement())?;
        Ok(joined.orthogonal_complement())
    }

    fn same_ambient(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

pub(crate) fn is_canonical(rows: &[u64]) -> bool {
    let pivots: Vec<u32> = rows.iter().map(|&r| high_bit(r)).collect();
    if rows.contains(&0) || pivots.windows(2).any(|w| w[0] <= w[1]) {
        return false;
    }
    let pivot_mask = pivots.iter().fold(0u64, |m, &p| m | 1 << p);
    rows.iter()
        .zip(&pivots)
        .all(|(&r, &p)| r & pivot_mask == 1 << p)
}

/// Inner product of two raw words.
pub fn dot(a: Gf2Vector, b: Gf2Vector) -> Result<u8> {
    a.dot(b)
}

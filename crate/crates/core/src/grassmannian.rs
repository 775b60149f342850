//! Exhaustive enumeration of `Gr(n,d)` over GF(2) by Schubert cells.
//!
//! A cell is fixed by its pivot columns; pivot sets are visited in colex
//! order (increasing bitmask with `d` bits set) and, inside a cell, the free
//! entries run through `0 .. 2^f` as an integer counter. Every subspace is
//! produced exactly once, already in canonical form.

use num_traits::ToPrimitive;

use crate::counting::gaussian_binomial;
use crate::error::{guard, Error, Result};
use crate::gf2::{mask, Subspace, MAX_AMBIENT_DIM};

/// Default cap on the number of subspaces any enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Iterator over `Gr(n,d)`.
#[derive(Debug, Clone)]
pub struct Grassmannian {
    n: u32,
    d: u32,
    total: u64,
    /// Current pivot set; `None` once exhausted.
    pivots: Option<u64>,
    /// `(row index, column)` of each free entry in the current cell.
    free: Vec<(usize, u32)>,
    counter: u64,
    rows: Vec<u64>,
}

/// Stream every `d`-dimensional subspace of `Z_2^n` under the default budget.
pub fn enumerate_grassmannian(n: u32, d: u32) -> Result<Grassmannian> {
    Grassmannian::with_budget(n, d, DEFAULT_BUDGET)
}

impl Grassmannian {
    pub fn with_budget(n: u32, d: u32, budget: u64) -> Result<Self> {
        if n == 0 || n > MAX_AMBIENT_DIM {
            return Err(Error::AmbientDimension {
                n,
                max: MAX_AMBIENT_DIM,
            });
        }
        if d > n {
            return Err(Error::SubspaceDimension { dim: d, n });
        }
        let count = gaussian_binomial(n, d)?;
        let total = match count.to_u64() {
            Some(c) if c <= budget => c,
            _ => return Err(guard("Grassmannian subspaces", &count, budget)),
        };
        let mut it = Self {
            n,
            d,
            total,
            pivots: Some(mask(d)),
            free: Vec::new(),
            counter: 0,
            rows: Vec::new(),
        };
        it.enter_cell();
        Ok(it)
    }

    /// Exact number of subspaces this iterator yields in total.
    pub fn total(&self) -> u64 {
        self.total
    }

    fn enter_cell(&mut self) {
        let Some(piv) = self.pivots else { return };
        self.rows.clear();
        self.free.clear();
        self.counter = 0;
        let mut p = piv;
        // rows in descending pivot order
        let mut ps = Vec::with_capacity(self.d as usize);
        while p != 0 {
            let top = 63 - p.leading_zeros();
            ps.push(top);
            p &= !(1u64 << top);
        }
        for (row, &pc) in ps.iter().enumerate() {
            self.rows.push(1u64 << pc);
            let mut open = mask(pc) & !piv;
            while open != 0 {
                let col = open.trailing_zeros();
                open &= open - 1;
                self.free.push((row, col));
            }
        }
    }

    fn advance_cell(&mut self) {
        let Some(x) = self.pivots else { return };
        if x == 0 {
            self.pivots = None;
            return;
        }
        // Gosper's hack: next integer with the same popcount
        let c = x & x.wrapping_neg();
        let r = x + c;
        let next = (((r ^ x) >> 2) / c) | r;
        self.pivots = if next > mask(self.n) {
            None
        } else {
            Some(next)
        };
        self.enter_cell();
    }
}

impl Iterator for Grassmannian {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        loop {
            self.pivots?;
            if self.counter >> self.free.len() == 0 {
                let mut rows = self.rows.clone();
                for (i, &(row, col)) in self.free.iter().enumerate() {
                    if self.counter >> i & 1 == 1 {
                        rows[row] |= 1u64 << col;
                    }
                }
                self.counter += 1;
                return Some(Subspace::from_canonical_rows(self.n, rows));
            }
            self.advance_cell();
        }
    }
}

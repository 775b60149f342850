//! Sparse vectors in the kernel of row-subsampled Hadamard matrices.
//!
//! Rows of the `2^n x 2^n` Hadamard matrix are sampled independently. The
//! indicator of a `k`-dimensional subspace `V` of `Z_2^n` is `2^k`-sparse and
//! is mapped by the transform to the indicator of `V^⊥`, so it lies in the
//! kernel of the sampled matrix exactly when no sampled row falls in `V^⊥`.
//! This crate searches for such subspaces, counts them exactly, and checks
//! the first- and second-moment estimates that predict when they exist.

pub mod cli;
pub mod counting;
pub mod error;
pub mod experiment;
pub mod gf2;
pub mod grassmannian;
pub mod report;
pub mod transform;

pub use error::{Error, Result};

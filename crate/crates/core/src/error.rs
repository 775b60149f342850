use thiserror::Error;

/// Errors raised by the library. Every resource guard surfaces as a variant
/// here instead of a panic or an allocation failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },

    #[error("invalid ambient dimension {n} (supported range 1..={max})")]
    AmbientDimension { n: u32, max: u32 },

    #[error("vector {bits:#x} has bits outside ambient dimension {n}")]
    VectorOutOfRange { bits: u64, n: u32 },

    #[error("subspace dimension {dim} is out of range for ambient dimension {n}")]
    SubspaceDimension { dim: u32, n: u32 },

    #[error("enumeration guard exceeded: {what} needs {needed}, limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        needed: String,
        limit: String,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: u64, len: u64 },

    #[error("vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("witness invalid: sampled row {row:#x} lies in the complement span")]
    WitnessInvalid { row: u64 },

    #[error("missing pair-count entry for intersection dimension {0}")]
    MissingTableEntry(u32),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn guard(what: &'static str, needed: impl ToString, limit: impl ToString) -> Error {
    Error::GuardExceeded {
        what,
        needed: needed.to_string(),
        limit: limit.to_string(),
    }
}

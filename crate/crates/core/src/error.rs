use thiserror::Error;

use crate::norms::BlockShape;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponent `{0}`: expected `inf`, an integer >= 1 or a rational `a/b` >= 1")]
    InvalidExponent(String),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid shape: s = {s}, b = {b} (both must be positive)")]
    InvalidShape { s: usize, b: usize },

    #[error("expected {expected} entries for shape {shape}, got {got}")]
    EntryCount {
        shape: BlockShape,
        expected: usize,
        got: usize,
    },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch {
        expected: BlockShape,
        got: BlockShape,
    },

    #[error("the zero vector cannot be normalized")]
    ZeroNormalization,

    #[error("{0} is not a prime power")]
    NotPrimePower(u32),

    #[error("field order {0} is not supported (primes up to 65536, 2^u with u <= 6, odd prime powers up to 4096)")]
    UnsupportedFieldOrder(u32),

    #[error("inverse of zero")]
    ZeroInverse,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {point} lies in only {found} sets, need at least {needed}")]
    DeficientPoint {
        point: usize,
        found: usize,
        needed: usize,
    },

    #[error("matrix is supported on more than one column (columns {0} and {1})")]
    MultiColumnSupport(usize, usize),

    #[error("input lies outside the unit ball: norm {0}")]
    OutsideBall(f64),

    #[error("tuple is not in the exceptional case: {0}")]
    NotExceptional(String),

    #[error("tuple is rigid (case {0}); no non-rigidity witness exists")]
    RigidTuple(String),

    #[error("tuple is non-rigid ({0}); no rigidity certificate exists")]
    NonRigidTuple(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Mixed-norm balls and their approximation by low-dimensional subspaces.
//!
//! The crate is organised by the objects the construction is built from:
//!
//! * [`norms`]: exponents, block matrices, mixed norms and ball samplers.
//! * [`designs`]: small finite fields and affine-line block designs.
//! * [`partitions`]: `(m, r, l)`-partitions of the `s x b` grid.
//! * [`spread`]: the spreading operator, best k-term block selection and the
//!   full approximation pipeline.
//! * [`widths`]: closed-form width oracles and the rigidity classifier.
//! * [`sweep`]: seeded measurement of the pipeline over a list of sizes.

pub mod designs;
pub mod error;
pub mod norms;
pub mod partitions;
pub mod spread;
pub mod sweep;
pub mod widths;

pub use error::{Error, Result};
pub use norms::{BlockMatrix, BlockShape, Exponent, MixedNormParams};

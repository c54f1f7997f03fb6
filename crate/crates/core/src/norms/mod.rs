//! Exponents, block matrices and mixed norms.
//!
//! A vector of `R^N`, `N = s * b`, is viewed as an `s x b` matrix whose
//! columns are the blocks of the mixed norm. Entries are stored
//! column-block-major so that every block is a contiguous slice.

mod exponent;
mod sampling;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use exponent::{positive_part, pow_rational, ratio_string, ratio_to_f64, Exponent, Rational};
pub use sampling::{extreme_points_inf1, one_column_sign_points, sample_ball, seeded_rng};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockShape {
    /// Block size (rows).
    pub s: usize,
    /// Number of blocks (columns).
    pub b: usize,
}

impl BlockShape {
    pub fn new(s: usize, b: usize) -> Result<Self> {
        if s == 0 || b == 0 {
            return Err(Error::InvalidShape { s, b });
        }
        Ok(BlockShape { s, b })
    }

    /// Total dimension `N = s * b`.
    pub fn n(self) -> usize {
        self.s * self.b
    }

    /// Flat index of entry `(i, j)`: coordinate `i` of block `j`.
    #[inline]
    pub fn index(self, i: usize, j: usize) -> usize {
        j * self.s + i
    }
}

impl fmt::Display for BlockShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.s, self.b)
    }
}

impl fmt::Debug for BlockShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockShape({self})")
    }
}

/// A real `s x b` matrix; column `j` is block `x[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBlockMatrix", into = "RawBlockMatrix")]
pub struct BlockMatrix {
    shape: BlockShape,
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawBlockMatrix {
    s: usize,
    b: usize,
    entries: Vec<f64>,
}

impl TryFrom<RawBlockMatrix> for BlockMatrix {
    type Error = Error;

    fn try_from(raw: RawBlockMatrix) -> Result<Self> {
        BlockMatrix::new(BlockShape::new(raw.s, raw.b)?, raw.entries)
    }
}

impl From<BlockMatrix> for RawBlockMatrix {
    fn from(x: BlockMatrix) -> Self {
        RawBlockMatrix {
            s: x.shape.s,
            b: x.shape.b,
            entries: x.entries,
        }
    }
}

impl BlockMatrix {
    pub fn new(shape: BlockShape, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != shape.n() {
            return Err(Error::EntryCount {
                shape,
                expected: shape.n(),
                got: entries.len(),
            });
        }
        check_finite(&entries)?;
        Ok(BlockMatrix { shape, entries })
    }

    pub fn zeros(shape: BlockShape) -> Self {
        BlockMatrix {
            shape,
            entries: vec![0.0; shape.n()],
        }
    }

    /// Builds a matrix from `b` columns of equal length `s`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let s = columns.first().map_or(0, Vec::len);
        let shape = BlockShape::new(s, columns.len())?;
        let mut entries = Vec::with_capacity(shape.n());
        for c in columns {
            if c.len() != s {
                return Err(Error::InvalidArgument(format!(
                    "ragged columns: expected length {s}, got {}",
                    c.len()
                )));
            }
            entries.extend_from_slice(c);
        }
        Self::new(shape, entries)
    }

    pub fn shape(&self) -> BlockShape {
        self.shape
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[self.shape.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let idx = self.shape.index(i, j);
        self.entries[idx] = value;
    }

    /// Block `x[j]`.
    pub fn column(&self, j: usize) -> &[f64] {
        let s = self.shape.s;
        &self.entries[j * s..(j + 1) * s]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.shape.s)
    }

    /// Indices of columns that contain a nonzero entry.
    pub fn support_columns(&self) -> Vec<usize> {
        self.columns()
            .enumerate()
            .filter(|(_, c)| c.iter().any(|&v| v != 0.0))
            .map(|(j, _)| j)
            .collect()
    }

    /// Copy of `self` with every column outside `keep` set to zero.
    pub fn restrict_columns(&self, keep: &[usize]) -> BlockMatrix {
        let mut out = BlockMatrix::zeros(self.shape);
        let s = self.shape.s;
        for &j in keep {
            out.entries[j * s..(j + 1) * s].copy_from_slice(self.column(j));
        }
        out
    }

    /// Columns `start..start + len` as a matrix of their own.
    pub fn column_range(&self, start: usize, len: usize) -> BlockMatrix {
        let s = self.shape.s;
        BlockMatrix {
            shape: BlockShape { s, b: len },
            entries: self.entries[start * s..(start + len) * s].to_vec(),
        }
    }

    pub fn transpose(&self) -> BlockMatrix {
        let BlockShape { s, b } = self.shape;
        let mut out = BlockMatrix::zeros(BlockShape { s: b, b: s });
        for j in 0..b {
            for i in 0..s {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> BlockMatrix {
        BlockMatrix {
            shape: self.shape,
            entries: self.entries.iter().map(|v| v * c).collect(),
        }
    }

    pub fn sub(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &BlockMatrix, f: impl Fn(f64, f64) -> f64) -> Result<BlockMatrix> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape,
                got: other.shape,
            });
        }
        Ok(BlockMatrix {
            shape: self.shape,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

/// Inner and outer exponent of `||.||_{q1,q2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedNormParams {
    pub inner: Exponent,
    pub outer: Exponent,
}

impl MixedNormParams {
    pub fn new(inner: Exponent, outer: Exponent) -> Self {
        MixedNormParams { inner, outer }
    }
}

fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// `||v||_q`; rejects non-finite input.
pub fn lq_norm(v: &[f64], q: Exponent) -> Result<f64> {
    check_finite(v)?;
    Ok(norm(v, q))
}

/// `||v||_q` for finite input. Values are scaled by the largest magnitude
/// before taking powers.
pub(crate) fn norm(v: &[f64], q: Exponent) -> f64 {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 || q.is_infinite() {
        return max;
    }
    if q == Exponent::ONE {
        return v.iter().map(|x| x.abs()).sum();
    }
    if q == Exponent::TWO {
        let sum: f64 = v.iter().map(|x| (x / max) * (x / max)).sum();
        return max * sum.sqrt();
    }
    let p = q.value();
    let sum: f64 = v.iter().map(|x| (x.abs() / max).powf(p)).sum();
    max * sum.powf(q.recip_f64())
}

/// `y_j = ||x[j]||_{q1}`.
pub fn block_norm_vector(x: &BlockMatrix, q1: Exponent) -> Vec<f64> {
    x.columns().map(|c| norm(c, q1)).collect()
}

/// `||x||_{q1,q2}`.
pub fn mixed_norm(x: &BlockMatrix, params: MixedNormParams) -> f64 {
    norm(&block_norm_vector(x, params.inner), params.outer)
}

/// Exponents `((1/q1 - 1/p1)_+, (1/q2 - 1/p2)_+)` of `d_0`.
pub fn d0_exponents(
    p1: Exponent,
    p2: Exponent,
    q1: Exponent,
    q2: Exponent,
) -> (Rational, Rational) {
    (
        positive_part(q1.recip() - p1.recip()),
        positive_part(q2.recip() - p2.recip()),
    )
}

/// Width at dimension zero: `sup ||x||_{q1,q2}` over the unit ball of
/// `||.||_{p1,p2}`, i.e. `s^{(1/q1-1/p1)_+} b^{(1/q2-1/p2)_+}`.
pub fn d0_mixed(shape: BlockShape, p1: Exponent, p2: Exponent, q1: Exponent, q2: Exponent) -> f64 {
    let (e1, e2) = d0_exponents(p1, p2, q1, q2);
    pow_rational(shape.s as f64, e1) * pow_rational(shape.b as f64, e2)
}

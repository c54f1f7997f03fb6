//! Approximation of mixed-norm ball elements by group-constant matrices.
//!
//! For `x` in the unit ball of `||.||_{p1,p2}` the pipeline keeps the
//! fewer than `k` columns with the largest `l_{p1}` norms, spreads them with
//! the partition's operator, and reports the `l_{q1,q2}` error together
//! with the triangle-inequality bound evaluated on the concrete partition.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use super::{column_norms_of, lemma3_bound, sigma_k, SpreadOperator};
use crate::error::{Error, Result};
use crate::norms::{
    block_norm_vector, mixed_norm, norm, positive_part, pow_rational, ratio_string, BlockMatrix,
    BlockShape, Exponent, MixedNormParams, Rational,
};
use crate::partitions::good_partition;
use crate::widths::classify;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineParams {
    pub p1: Exponent,
    pub p2: Exponent,
    pub q1: Exponent,
    pub q2: Exponent,
    /// Design dimension passed to the good partition.
    pub d: u32,
    /// Block budget: fewer than `k` columns are kept.
    pub k: usize,
    pub alpha: Rational,
}

impl PipelineParams {
    pub fn with_overrides(mut self, d: Option<u32>, k: Option<usize>) -> Result<Self> {
        if let Some(d) = d {
            if d < 2 {
                return Err(Error::InvalidArgument(format!(
                    "d = {d} must be at least 2"
                )));
            }
            self.d = d;
        }
        if let Some(k) = k {
            if k == 0 {
                return Err(Error::InvalidArgument("k must be at least 1".into()));
            }
            self.k = k;
        }
        Ok(self)
    }

    pub fn target(&self) -> MixedNormParams {
        MixedNormParams::new(self.q1, self.q2)
    }

    pub fn ball(&self) -> MixedNormParams {
        MixedNormParams::new(self.p1, self.p2)
    }

    pub fn alpha_string(&self) -> String {
        ratio_string(self.alpha)
    }
}

/// `alpha = (1/q1 - 1/p1) - (1/q2 - 1/p1)_+`.
pub fn alpha(p1: Exponent, q1: Exponent, q2: Exponent) -> Rational {
    (q1.recip() - p1.recip()) - positive_part(q2.recip() - p1.recip())
}

/// Smallest `k >= 1` with `k^den >= b^num`, i.e. `ceil(b^{num/den})`.
fn ceil_rational_power(b: usize, e: Rational) -> usize {
    let (num, den) = (*e.numer() as u32, *e.denom() as u32);
    let target = BigUint::from(b).pow(num);
    let reaches = |k: usize| BigUint::from(k).pow(den) >= target;
    let mut k = pow_rational(b as f64, e).ceil().max(1.0) as usize;
    while k > 1 && reaches(k - 1) {
        k -= 1;
    }
    while !reaches(k) {
        k += 1;
    }
    k
}

/// Parameters for a tuple in the exceptional region.
///
/// `d` is the least integer `>= 2` with `(1/q1) / d <= alpha / 2` and
/// `k = max(1, ceil(b^{alpha/4}))`.
pub fn choose_params(
    p1: Exponent,
    p2: Exponent,
    q1: Exponent,
    q2: Exponent,
    _s: usize,
    b: usize,
) -> Result<PipelineParams> {
    let report = classify(p1, p2, q1, q2);
    if !report.is_exceptional() {
        return Err(Error::NotExceptional(report.explanation()));
    }
    let alpha = alpha(p1, q1, q2);
    debug_assert!(alpha > Rational::zero());
    let ratio = Rational::from_integer(2) * q1.recip() / alpha;
    let d = ratio.ceil().to_integer().max(2) as u32;
    let k = ceil_rational_power(b.max(1), alpha / Rational::from_integer(4)).max(1);
    Ok(PipelineParams {
        p1,
        p2,
        q1,
        q2,
        d,
        k,
        alpha,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxResult {
    /// Kept columns, ascending.
    pub selected: Vec<usize>,
    #[serde(skip)]
    pub approximant: BlockMatrix,
    pub measured_error: f64,
    pub certified_bound: f64,
    /// `sigma_{k-1}(y)_{q2}` of the block-norm vector.
    pub delta: f64,
    pub dimension: usize,
}

fn check_ball(x: &BlockMatrix, params: &PipelineParams) -> Result<()> {
    let n = mixed_norm(x, params.ball());
    if n > 1.0 + 1e-9 {
        return Err(Error::OutsideBall(n));
    }
    Ok(())
}

/// Approximates `x` by `D x^L`, `L` the fewer than `k` columns of largest
/// `l_{p1}` norm.
pub fn approximate(
    x: &BlockMatrix,
    params: &PipelineParams,
    op: &SpreadOperator,
) -> Result<ApproxResult> {
    if x.shape() != op.shape() {
        return Err(Error::ShapeMismatch {
            expected: op.shape(),
            got: x.shape(),
        });
    }
    check_ball(x, params)?;
    let shape = x.shape();
    let y = block_norm_vector(x, params.p1);
    let budget = (params.k - 1).min(shape.b);
    let sel = sigma_k(&y, budget, params.q2)?;
    let approximant = op.apply_to_columns(x, &sel.support)?;
    let residual = x.sub(&approximant)?;
    let measured_error = mixed_norm(&residual, params.target());

    let inner_loss = pow_rational(
        shape.s as f64,
        positive_part(params.q1.recip() - params.p1.recip()),
    );
    let per_column = lemma3_bound(op.partition(), params.p1, params.q1, params.q2);
    let spread_loss: f64 = column_norms_of(x, &sel.support, params.p1)
        .iter()
        .sum::<f64>()
        * per_column;
    Ok(ApproxResult {
        selected: sel.support,
        approximant,
        measured_error,
        certified_bound: sel.error * inner_loss + spread_loss,
        delta: sel.error,
        dimension: op.dimension(),
    })
}

/// Per-group operators for `s < b`: the columns are cut into `ceil(b/s)`
/// contiguous groups of at most `s` columns, each with its own good
/// partition.
#[derive(Clone, Debug)]
pub struct GroupedOperator {
    shape: BlockShape,
    /// `(first column, operator)` per group.
    groups: Vec<(usize, SpreadOperator)>,
}

impl GroupedOperator {
    pub fn new(s: usize, b: usize, d: u32) -> Result<Self> {
        let shape = BlockShape::new(s, b)?;
        if s >= b {
            return Err(Error::InvalidArgument(format!(
                "grouped construction needs s < b (got s = {s}, b = {b})"
            )));
        }
        let mut groups = Vec::with_capacity(b.div_ceil(s));
        let mut start = 0;
        while start < b {
            let width = s.min(b - start);
            groups.push((start, SpreadOperator::new(good_partition(s, width, d)?)?));
            start += width;
        }
        Ok(GroupedOperator { shape, groups })
    }

    pub fn shape(&self) -> BlockShape {
        self.shape
    }

    pub fn groups(&self) -> impl Iterator<Item = (usize, &SpreadOperator)> {
        self.groups.iter().map(|(start, op)| (*start, op))
    }

    /// Dimension of the direct sum of the per-group spaces.
    pub fn dimension(&self) -> usize {
        self.groups.iter().map(|(_, op)| op.dimension()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupedApprox {
    /// Combined result; `certified_bound` is the `l_{q2}` norm of the
    /// per-group bounds.
    pub combined: ApproxResult,
    pub per_group: Vec<ApproxResult>,
}

pub fn approximate_grouped(
    x: &BlockMatrix,
    params: &PipelineParams,
    op: &GroupedOperator,
) -> Result<GroupedApprox> {
    if x.shape() != op.shape {
        return Err(Error::ShapeMismatch {
            expected: op.shape,
            got: x.shape(),
        });
    }
    check_ball(x, params)?;
    let mut per_group = Vec::with_capacity(op.groups.len());
    let mut entries = Vec::with_capacity(x.shape().n());
    let mut selected = Vec::new();
    for (start, gop) in &op.groups {
        let sub = x.column_range(*start, gop.shape().b);
        let res = approximate(&sub, params, gop)?;
        selected.extend(res.selected.iter().map(|j| j + start));
        entries.extend_from_slice(res.approximant.entries());
        per_group.push(res);
    }
    let approximant = BlockMatrix::new(x.shape(), entries)?;
    let residual = x.sub(&approximant)?;
    let bounds: Vec<f64> = per_group.iter().map(|r| r.certified_bound).collect();
    let deltas: Vec<f64> = per_group.iter().map(|r| r.delta).collect();
    let combined = ApproxResult {
        selected,
        measured_error: mixed_norm(&residual, params.target()),
        approximant,
        certified_bound: norm(&bounds, params.q2),
        delta: norm(&deltas, params.q2),
        dimension: op.dimension(),
    };
    Ok(GroupedApprox {
        combined,
        per_group,
    })
}

/// Builds the per-group operators for `x`'s shape and runs the grouped
/// pipeline.
pub fn grouped_subspace_approximate(
    x: &BlockMatrix,
    params: &PipelineParams,
) -> Result<GroupedApprox> {
    let shape = x.shape();
    let op = GroupedOperator::new(shape.s, shape.b, params.d)?;
    approximate_grouped(x, params, &op)
}

//! The spreading operator of a partition and best k-term selection.
//!
//! For a partition `Gamma` of `[s] x [b]`, the spreading operator sends the
//! unit vector of cell `(i, j)` to the indicator of the group containing
//! it. Its range is the space of group-constant matrices, whose dimension
//! is the number of nonempty groups.

mod pipeline;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{
    lq_norm, mixed_norm, norm, positive_part, pow_rational, BlockMatrix, BlockShape, Exponent,
    MixedNormParams,
};
use crate::partitions::Partition;

pub use pipeline::{
    alpha, approximate, approximate_grouped, choose_params, grouped_subspace_approximate,
    ApproxResult, GroupedApprox, GroupedOperator, PipelineParams,
};

#[derive(Clone, Debug)]
pub struct SpreadOperator {
    partition: Partition,
    group_of: Vec<u32>,
}

impl SpreadOperator {
    pub fn new(partition: Partition) -> Result<Self> {
        let shape = partition.shape();
        let mut group_of = vec![u32::MAX; shape.n()];
        for (k, group) in partition.groups().iter().enumerate() {
            for &(i, j) in group {
                if i >= shape.s || j >= shape.b {
                    return Err(Error::InvalidArgument(format!(
                        "cell ({i}, {j}) outside {shape}"
                    )));
                }
                let slot = &mut group_of[shape.index(i, j)];
                if *slot != u32::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "cell ({i}, {j}) lies in two groups"
                    )));
                }
                *slot = k as u32;
            }
        }
        if let Some(idx) = group_of.iter().position(|&g| g == u32::MAX) {
            return Err(Error::InvalidArgument(format!(
                "cell ({}, {}) is not covered",
                idx % shape.s,
                idx / shape.s
            )));
        }
        Ok(SpreadOperator {
            partition,
            group_of,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn shape(&self) -> BlockShape {
        self.partition.shape()
    }

    /// Dimension of the group-constant space.
    pub fn dimension(&self) -> usize {
        self.partition.m()
    }

    fn check_shape(&self, x: &BlockMatrix) -> Result<()> {
        if x.shape() != self.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                got: x.shape(),
            });
        }
        Ok(())
    }

    /// Every cell receives the sum of `x` over its group.
    pub fn apply(&self, x: &BlockMatrix) -> Result<BlockMatrix> {
        self.check_shape(x)?;
        let mut sums = vec![0.0; self.partition.m()];
        for (&g, &v) in self.group_of.iter().zip(x.entries()) {
            sums[g as usize] += v;
        }
        let entries = self.group_of.iter().map(|&g| sums[g as usize]).collect();
        BlockMatrix::new(self.shape(), entries)
    }

    /// `D x^L`, where `x^L` keeps only the columns in `cols`. Work is
    /// proportional to the number of cells reached from those columns.
    pub fn apply_to_columns(&self, x: &BlockMatrix, cols: &[usize]) -> Result<BlockMatrix> {
        self.check_shape(x)?;
        let shape = self.shape();
        let mut touched: Vec<(u32, f64)> = Vec::new();
        let mut slot_of = std::collections::HashMap::new();
        for &j in cols {
            for (i, &v) in x.column(j).iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let g = self.group_of[shape.index(i, j)];
                let slot = *slot_of.entry(g).or_insert_with(|| {
                    touched.push((g, 0.0));
                    touched.len() - 1
                });
                touched[slot].1 += v;
            }
        }
        let mut out = BlockMatrix::zeros(shape);
        let entries = out.entries_mut();
        for (g, sum) in touched {
            for &(i, j) in &self.partition.groups()[g as usize] {
                entries[shape.index(i, j)] = sum;
            }
        }
        Ok(out)
    }
}

/// `D x` for the operator of `partition`.
pub fn apply_spread(op: &SpreadOperator, x: &BlockMatrix) -> Result<BlockMatrix> {
    op.apply(x)
}

/// Coefficient `l^{(1/q1-1/p)_+} b^{(1/q2-1/p)_+} (r-1)^{1/p}` bounding
/// `||x - D x||_{q1,q2} / ||x||_p` for one-column `x`, using the
/// partition's declared `r` and `l`.
pub fn lemma3_bound(partition: &Partition, p: Exponent, q1: Exponent, q2: Exponent) -> f64 {
    let l_exp = positive_part(q1.recip() - p.recip());
    let b_exp = positive_part(q2.recip() - p.recip());
    let l = partition.l() as f64;
    let b = partition.shape().b as f64;
    let spread = pow_rational(partition.r().saturating_sub(1) as f64, p.recip());
    pow_rational(l, l_exp) * pow_rational(b, b_exp) * spread
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lemma3Check {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Evaluates both sides of the one-column operator bound for `x`.
pub fn check_lemma3(
    op: &SpreadOperator,
    p: Exponent,
    q1: Exponent,
    q2: Exponent,
    x: &BlockMatrix,
) -> Result<Lemma3Check> {
    let support = x.support_columns();
    if support.len() > 1 {
        return Err(Error::MultiColumnSupport(support[0], support[1]));
    }
    let residual = x.sub(&op.apply_to_columns(x, &support)?)?;
    let lhs = mixed_norm(&residual, MixedNormParams::new(q1, q2));
    let rhs = lemma3_bound(op.partition(), p, q1, q2) * lq_norm(x.entries(), p)?;
    Ok(Lemma3Check {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-9,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaK {
    /// `||y - y^S||_q`.
    pub error: f64,
    /// Kept indices `S`, ascending.
    pub support: Vec<usize>,
}

/// Best `k`-term approximation error of `y` in `l_q`: keeps the `k`
/// largest-magnitude nonzero entries (lowest index wins ties).
pub fn sigma_k(y: &[f64], k: usize, q: Exponent) -> Result<SigmaK> {
    if k > y.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds length {}",
            y.len()
        )));
    }
    let mut order: Vec<usize> = (0..y.len()).filter(|&i| y[i] != 0.0).collect();
    order.sort_by(|&a, &b| y[b].abs().total_cmp(&y[a].abs()).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    let mut rest = y.to_vec();
    for &i in &order {
        rest[i] = 0.0;
    }
    Ok(SigmaK {
        error: lq_norm(&rest, q)?,
        support: order,
    })
}

/// Groups `{(i, j), (j, i)}` for `i < j` followed by the diagonal
/// singletons; `(m, r, l) = (s (s+1) / 2, 2, 1)`.
pub fn transposition_partition(s: usize) -> Result<Partition> {
    let shape = BlockShape::new(s, s)?;
    let mut groups = Vec::with_capacity(s * (s + 1) / 2);
    for i in 0..s {
        for j in i + 1..s {
            groups.push(vec![(i, j), (j, i)]);
        }
    }
    groups.extend((0..s).map(|i| vec![(i, i)]));
    let (r, l) = if s > 1 { (2, 1) } else { (1, 0) };
    Ok(Partition::new(shape, groups, r, l))
}

/// `||x - x^T||`-style witness: approximates `x` by the skew-symmetric
/// matrix `x - x^T`, leaving residual `x^T`. Returns the residual norm in
/// `l_{q1,q2}`.
pub fn skew_symmetric_residual(x: &BlockMatrix, params: MixedNormParams) -> Result<f64> {
    let shape = x.shape();
    if shape.s != shape.b {
        return Err(Error::InvalidArgument(format!(
            "skew-symmetric witness needs a square matrix, got {shape}"
        )));
    }
    let approx = x.sub(&x.transpose())?;
    Ok(mixed_norm(&x.sub(&approx)?, params))
}

pub(crate) fn column_norms_of(x: &BlockMatrix, cols: &[usize], p: Exponent) -> Vec<f64> {
    cols.iter().map(|&j| norm(x.column(j), p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{extreme_points_inf1, sample_ball, seeded_rng};
    use crate::partitions::{good_partition, row_partition, singleton_partition, verify_partition};
    use rand::Rng;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn shape(s: usize, b: usize) -> BlockShape {
        BlockShape::new(s, b).unwrap()
    }

    #[test]
    fn singleton_is_identity() {
        let sh = shape(3, 4);
        let op = SpreadOperator::new(singleton_partition(sh)).unwrap();
        let x = &sample_ball(sh, e("2"), e("2"), 1, 1)[0];
        assert_eq!(&op.apply(x).unwrap(), x);
        assert_eq!(lemma3_bound(op.partition(), e("1"), e("1"), e("2")), 0.0);
    }

    #[test]
    fn row_partition_spreads_along_row() {
        let sh = shape(3, 4);
        let op = SpreadOperator::new(row_partition(sh)).unwrap();
        let mut x = BlockMatrix::zeros(sh);
        x.set(0, 0, 1.0);
        let dx = op.apply(&x).unwrap();
        for j in 0..4 {
            assert_eq!(dx.get(0, j), 1.0);
            assert_eq!(dx.get(1, j), 0.0);
            assert_eq!(dx.get(2, j), 0.0);
        }
    }

    #[test]
    fn transposition_structure() {
        let p = transposition_partition(2).unwrap();
        assert_eq!(
            p.groups(),
            &[vec![(0, 1), (1, 0)], vec![(0, 0)], vec![(1, 1)]]
        );
        let p = transposition_partition(4).unwrap();
        assert_eq!((p.m(), p.r(), p.l()), (10, 2, 1));
        let rep = verify_partition(&p);
        assert!(rep.ok);
        assert_eq!(rep.l_observed, 1);
        assert!(transposition_partition(0).is_err());
    }

    #[test]
    fn transposition_residual_is_offdiagonal_transpose() {
        let s = 6;
        let sh = shape(s, s);
        let op = SpreadOperator::new(transposition_partition(s).unwrap()).unwrap();
        let p12 = MixedNormParams::new(e("1"), e("2"));
        for x in extreme_points_inf1(sh, 5, 10) {
            let residual = x.sub(&op.apply(&x).unwrap()).unwrap();
            let mut oracle = x.transpose();
            for i in 0..s {
                oracle.set(i, i, 0.0);
            }
            assert_eq!(residual, oracle.scale(-1.0));
            assert_eq!(mixed_norm(&residual, p12), ((s - 1) as f64).sqrt());
            assert_eq!(skew_symmetric_residual(&x, p12).unwrap(), (s as f64).sqrt());
        }
    }

    #[test]
    fn lemma3_bound_examples() {
        let t = transposition_partition(9).unwrap();
        assert_eq!(lemma3_bound(&t, e("inf"), e("1"), e("2")), 3.0);
        let g = good_partition(16, 16, 2).unwrap();
        assert_eq!(lemma3_bound(&g, e("inf"), e("1"), e("2")), 16.0);
    }

    #[test]
    fn check_lemma3_guards_and_zero() {
        let sh = shape(4, 4);
        let op = SpreadOperator::new(good_partition(4, 4, 2).unwrap()).unwrap();
        let z = BlockMatrix::zeros(sh);
        let c = check_lemma3(&op, e("2"), e("1"), e("2"), &z).unwrap();
        assert_eq!((c.lhs, c.rhs, c.ok), (0.0, 0.0, true));
        let mut x = BlockMatrix::zeros(sh);
        x.set(0, 0, 1.0);
        x.set(0, 3, 1.0);
        assert_eq!(
            check_lemma3(&op, e("2"), e("1"), e("2"), &x),
            Err(Error::MultiColumnSupport(0, 3))
        );
    }

    #[test]
    fn sparse_application_matches_dense() {
        let sh = shape(16, 11);
        let op = SpreadOperator::new(good_partition(16, 11, 2).unwrap()).unwrap();
        let x = &sample_ball(sh, e("2"), e("1"), 4, 1)[0];
        let cols = [2, 7];
        let dense = op.apply(&x.restrict_columns(&cols)).unwrap();
        assert_eq!(op.apply_to_columns(x, &cols).unwrap(), dense);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let op = SpreadOperator::new(singleton_partition(shape(2, 2))).unwrap();
        assert!(matches!(
            op.apply(&BlockMatrix::zeros(shape(2, 3))),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn sigma_k_examples() {
        let r = sigma_k(&[3.0, 2.0, 1.0], 1, e("inf")).unwrap();
        assert_eq!((r.error, r.support), (2.0, vec![0]));
        let r = sigma_k(&[0.0, -5.0, 0.0, 1.0], 2, e("1")).unwrap();
        assert_eq!(r.error, 0.0);
        let r = sigma_k(&[1.0, 1.0, 1.0], 1, e("1")).unwrap();
        assert_eq!((r.error, r.support), (2.0, vec![0]));
        assert!(sigma_k(&[1.0], 2, e("1")).is_err());
    }

    #[test]
    fn residual_columns_have_at_most_l_nonzeros() {
        let mut rng = seeded_rng(11);
        for (s, b, d) in [(16, 16, 2), (9, 7, 2), (30, 12, 3)] {
            let p = good_partition(s, b, d).unwrap();
            let (r, l) = (p.r(), p.l());
            let op = SpreadOperator::new(p).unwrap();
            let j = rng.random_range(0..b);
            let mut x = BlockMatrix::zeros(shape(s, b));
            for i in 0..s {
                x.set(
                    i,
                    j,
                    rng.random_range(1.0..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
                );
            }
            let z = x.sub(&op.apply(&x).unwrap()).unwrap();
            for col in z.columns() {
                assert!(col.iter().filter(|&&v| v != 0.0).count() <= l);
            }
            for i in 0..s {
                let v = x.get(i, j);
                assert!(z.entries().iter().filter(|&&t| t == -v).count() <= r - 1);
            }
        }
    }
}

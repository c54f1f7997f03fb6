//! `(m, r, l)`-partitions of the grid `[s] x [b]`.
//!
//! A partition splits the cells `(i, j)` (row `i`, column `j`) into groups
//! such that
//!
//! 1. every group has at most `r` cells,
//! 2. every column meets each group at most once,
//! 3. any two columns are jointly met by at most `l` groups.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::designs::{affine_line_design, repeat_design, PairTally};
use crate::error::{Error, Result};
use crate::norms::BlockShape;

/// Grid cell `(row, column)`.
pub type Cell = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    shape: BlockShape,
    groups: Vec<Vec<Cell>>,
    r: usize,
    l: usize,
    empty_groups: usize,
}

impl Partition {
    /// Wraps explicit groups with declared bounds `r` and `l`. Empty groups
    /// are dropped and counted; validity is checked by [`verify_partition`].
    pub fn new(shape: BlockShape, groups: Vec<Vec<Cell>>, r: usize, l: usize) -> Self {
        let total = groups.len();
        let groups: Vec<_> = groups.into_iter().filter(|g| !g.is_empty()).collect();
        Partition {
            shape,
            empty_groups: total - groups.len(),
            groups,
            r,
            l,
        }
    }

    pub fn shape(&self) -> BlockShape {
        self.shape
    }

    /// Nonempty groups.
    pub fn groups(&self) -> &[Vec<Cell>] {
        &self.groups
    }

    /// Number of nonempty groups, the dimension of the group-constant space.
    pub fn m(&self) -> usize {
        self.groups.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Groups that ended up empty during construction or restriction.
    pub fn empty_groups(&self) -> usize {
        self.empty_groups
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Partition", 6)?;
        st.serialize_field("s", &self.shape.s)?;
        st.serialize_field("b", &self.shape.b)?;
        st.serialize_field("m", &self.m())?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("l", &self.l)?;
        let groups: Vec<Vec<[usize; 2]>> = self
            .groups
            .iter()
            .map(|g| g.iter().map(|&(i, j)| [i, j]).collect())
            .collect();
        st.serialize_field("groups", &groups)?;
        st.end()
    }
}

/// Each cell its own group: `r = 1`, `l = 0`.
pub fn singleton_partition(shape: BlockShape) -> Partition {
    let groups = (0..shape.b)
        .flat_map(|j| (0..shape.s).map(move |i| vec![(i, j)]))
        .collect();
    Partition::new(shape, groups, 1, 0)
}

/// Group `k` is row `k`: `r = b`, `l = s`.
pub fn row_partition(shape: BlockShape) -> Partition {
    let groups = (0..shape.s)
        .map(|i| (0..shape.b).map(|j| (i, j)).collect())
        .collect();
    Partition::new(
        shape,
        groups,
        shape.b,
        if shape.b > 1 { shape.s } else { 0 },
    )
}

/// Assigns cell `(i, j)` to the `i`-th lowest-indexed set containing `j`.
/// Returns one (possibly empty) group per set.
fn assign_cells(sets: &[Vec<usize>], s: usize, b: usize) -> Result<Vec<Vec<Cell>>> {
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); b];
    for (k, set) in sets.iter().enumerate() {
        for &j in set {
            if j >= b {
                return Err(Error::InvalidArgument(format!(
                    "set {k} contains point {j} outside [0, {b})"
                )));
            }
            if through[j].last() == Some(&k) {
                return Err(Error::InvalidArgument(format!("set {k} repeats point {j}")));
            }
            through[j].push(k);
        }
    }
    let mut groups = vec![Vec::new(); sets.len()];
    for (j, ks) in through.iter().enumerate() {
        if ks.len() < s {
            return Err(Error::DeficientPoint {
                point: j,
                found: ks.len(),
                needed: s,
            });
        }
        for (i, &k) in ks.iter().take(s).enumerate() {
            groups[k].push((i, j));
        }
    }
    Ok(groups)
}

fn max_pair_multiplicity(sets: &[Vec<usize>], b: usize) -> usize {
    let mut tally = PairTally::new(b);
    for set in sets {
        let mut sorted = set.clone();
        sorted.sort_unstable();
        tally.add_set(&sorted);
    }
    tally.max()
}

/// Partition of `[s] x [b]` from sets `A_k` of `[b]` where every point lies
/// in at least `s` sets. The declared `r` is the largest set size and `l`
/// the largest pair multiplicity among the sets.
pub fn partition_from_sets(sets: &[Vec<usize>], s: usize, b: usize) -> Result<Partition> {
    let shape = BlockShape::new(s, b)?;
    let groups = assign_cells(sets, s, b)?;
    let r = sets.iter().map(Vec::len).max().unwrap_or(0);
    let l = max_pair_multiplicity(sets, b);
    Ok(Partition::new(shape, groups, r, l))
}

/// Parameters chosen by [`good_partition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GoodPartitionParams {
    /// `r = 2^u`.
    pub u: u32,
    pub r: usize,
    /// Size `b' = r^d` of the design the partition is cut from.
    pub b_design: usize,
    /// Repetition count `l = ceil(s (r-1) / (b'-1))`.
    pub l: usize,
    /// Number of design sets before dropping empty groups.
    pub m_total: usize,
}

/// Smallest `u >= 1` with `b <= 2^{u d}`, together with the derived
/// parameters.
pub fn good_partition_params(s: usize, b: usize, d: u32) -> Result<GoodPartitionParams> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension d = {d} must be at least 2"
        )));
    }
    if b < 2 || s < b {
        return Err(Error::InvalidArgument(format!(
            "good partition needs s >= b >= 2 (got s = {s}, b = {b}); use the grouped construction for s < b"
        )));
    }
    let mut u = 1u32;
    let b_design = loop {
        let bd = 1usize
            .checked_shl(u * d)
            .filter(|_| u * d < usize::BITS)
            .ok_or_else(|| Error::InvalidArgument(format!("b = {b} is too large for d = {d}")))?;
        if b <= bd {
            break bd;
        }
        u += 1;
    };
    if u as usize > crate::designs::BINARY_MODULI.len() {
        return Err(Error::InvalidArgument(format!(
            "b = {b} with d = {d} needs GF(2^{u}), only u <= 6 is supported"
        )));
    }
    let r = 1usize << u;
    let l = (s * (r - 1)).div_ceil(b_design - 1);
    let m_total = l * b_design * (b_design - 1) / (r * (r - 1));
    Ok(GoodPartitionParams {
        u,
        r,
        b_design,
        l,
        m_total,
    })
}

/// Partition of `[s] x [b]` with `b^{1/d} <= r <= 2 b^{1/d}` built from the
/// affine lines of `GF(2^u)^d`, each repeated `l` times, and restricted to
/// the first `b` columns. `b = 1` gives the singleton partition.
pub fn good_partition(s: usize, b: usize, d: u32) -> Result<Partition> {
    if b == 1 {
        return Ok(singleton_partition(BlockShape::new(s, 1)?));
    }
    let params = good_partition_params(s, b, d)?;
    let design = repeat_design(&affine_line_design(1 << params.u, d)?, params.l)?;
    // Cells in columns >= b are discarded by the restriction, so only the
    // first b columns are assigned. Assignment of a column does not depend
    // on the other columns.
    let sets: Vec<Vec<usize>> = design
        .sets
        .iter()
        .map(|set| set.iter().copied().filter(|&j| j < b).collect())
        .collect();
    let groups = assign_cells(&sets, s, b)?;
    Ok(Partition::new(
        BlockShape::new(s, b)?,
        groups,
        params.r,
        params.l,
    ))
}

/// The partition induced on `[s'] x [b']`. Declared `r` and `l` are kept.
pub fn restrict(partition: &Partition, s: usize, b: usize) -> Result<Partition> {
    let shape = partition.shape;
    if s == 0 || b == 0 || s > shape.s || b > shape.b {
        return Err(Error::InvalidArgument(format!(
            "cannot restrict {shape} to {s}x{b}"
        )));
    }
    let groups: Vec<Vec<Cell>> = partition
        .groups
        .iter()
        .map(|g| g.iter().copied().filter(|&(i, j)| i < s && j < b).collect())
        .collect();
    let mut out = Partition::new(BlockShape::new(s, b)?, groups, partition.r, partition.l);
    out.empty_groups += partition.empty_groups;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub ok: bool,
    /// Every cell lies in exactly one group.
    pub cover_ok: bool,
    /// No group meets a column twice.
    pub columns_ok: bool,
    pub m: usize,
    pub empty_groups: usize,
    pub r_declared: usize,
    pub l_declared: usize,
    pub r_observed: usize,
    pub l_observed: usize,
    /// `m r / (s b)`.
    pub m_ratio: f64,
    /// `l b / (s r)`.
    pub l_ratio: f64,
    pub violations: Vec<String>,
}

/// Exhaustive check of the cover and of properties (i)-(iii).
pub fn verify_partition(partition: &Partition) -> PartitionReport {
    let BlockShape { s, b } = partition.shape;
    let mut violations = Vec::new();
    let mut seen = vec![0u32; s * b];
    let mut tally = PairTally::new(b);
    let mut columns_ok = true;
    let mut in_range = true;
    let mut r_observed = 0;
    let mut cols = Vec::new();

    for (k, group) in partition.groups.iter().enumerate() {
        r_observed = r_observed.max(group.len());
        cols.clear();
        for &(i, j) in group {
            if i >= s || j >= b {
                in_range = false;
                violations.push(format!("group {k} has cell ({i}, {j}) outside the grid"));
                continue;
            }
            seen[j * s + i] += 1;
            cols.push(j);
        }
        cols.sort_unstable();
        let before = cols.len();
        cols.dedup();
        if cols.len() != before {
            columns_ok = false;
            violations.push(format!("group {k} meets a column more than once"));
        }
        tally.add_set(&cols);
    }

    let missing = seen.iter().filter(|&&c| c == 0).count();
    let repeated = seen.iter().filter(|&&c| c > 1).count();
    if missing > 0 {
        violations.push(format!("{missing} cells are not covered"));
    }
    if repeated > 0 {
        violations.push(format!("{repeated} cells are covered more than once"));
    }
    let cover_ok = in_range && missing == 0 && repeated == 0;

    let l_observed = tally.max();
    if r_observed > partition.r {
        violations.push(format!(
            "group of size {r_observed} exceeds r = {}",
            partition.r
        ));
    }
    if l_observed > partition.l {
        violations.push(format!(
            "two columns share {l_observed} groups, exceeds l = {}",
            partition.l
        ));
    }
    let (sf, bf, rf) = (s as f64, b as f64, partition.r.max(1) as f64);
    PartitionReport {
        ok: violations.is_empty(),
        cover_ok,
        columns_ok,
        m: partition.m(),
        empty_groups: partition.empty_groups,
        r_declared: partition.r,
        l_declared: partition.l,
        r_observed,
        l_observed,
        m_ratio: partition.m() as f64 * rf / (sf * bf),
        l_ratio: partition.l as f64 * bf / (sf * rf),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(s: usize, b: usize) -> BlockShape {
        BlockShape::new(s, b).unwrap()
    }

    /// Brute-force (iii): number of groups meeting both columns.
    fn brute_l(p: &Partition) -> usize {
        let b = p.shape().b;
        let mut best = 0;
        for j1 in 0..b {
            for j2 in j1 + 1..b {
                let c = p
                    .groups()
                    .iter()
                    .filter(|g| g.iter().any(|c| c.1 == j1) && g.iter().any(|c| c.1 == j2))
                    .count();
                best = best.max(c);
            }
        }
        best
    }

    #[test]
    fn rows_from_copies_of_ground_set() {
        let sets = vec![(0..4).collect::<Vec<_>>(); 3];
        let p = partition_from_sets(&sets, 3, 4).unwrap();
        assert_eq!(p, row_partition(shape(3, 4)));
        assert_eq!((p.r(), p.l()), (4, 3));
        assert!(verify_partition(&p).ok);
    }

    #[test]
    fn from_affine_plane() {
        let d = affine_line_design(2, 2).unwrap();
        let p = partition_from_sets(&d.sets, 3, 4).unwrap();
        assert_eq!((p.r(), p.l()), (2, 1));
        let rep = verify_partition(&p);
        assert!(rep.ok, "{:?}", rep.violations);
        assert_eq!(rep.l_observed, brute_l(&p));
        // 12 cells in groups of size 2 over all 6 lines.
        assert_eq!(p.m(), 6);
    }

    #[test]
    fn deficient_point_is_named() {
        let sets = vec![vec![0, 1], vec![0, 2], vec![1, 2]];
        let err = partition_from_sets(&sets, 3, 3).unwrap_err();
        assert_eq!(
            err,
            Error::DeficientPoint {
                point: 0,
                found: 2,
                needed: 3
            }
        );
    }

    #[test]
    fn good_partition_examples() {
        let p = good_partition(16, 16, 2).unwrap();
        assert_eq!((p.r(), p.l()), (4, 4));
        assert_eq!(p.m() + p.empty_groups(), 80);
        assert!(verify_partition(&p).ok);

        let p = good_partition(4, 4, 2).unwrap();
        assert_eq!((p.r(), p.l()), (2, 2));
        assert!(verify_partition(&p).ok);

        let params = good_partition_params(8, 5, 2).unwrap();
        assert_eq!((params.b_design, params.r), (16, 4));
        let p = good_partition(8, 5, 2).unwrap();
        let rep = verify_partition(&p);
        assert!(rep.ok, "{:?}", rep.violations);
        assert_eq!(rep.l_observed, brute_l(&p));
    }

    #[test]
    fn good_partition_is_restriction_of_full_design() {
        for (s, b, d) in [(8, 5, 2), (12, 9, 2), (20, 11, 3), (7, 3, 2)] {
            let params = good_partition_params(s, b, d).unwrap();
            let design =
                repeat_design(&affine_line_design(params.r as u32, d).unwrap(), params.l).unwrap();
            let full = partition_from_sets(&design.sets, s, params.b_design).unwrap();
            let restricted = restrict(&full, s, b).unwrap();
            let direct = good_partition(s, b, d).unwrap();
            assert_eq!(direct.groups(), restricted.groups());
            assert_eq!(direct.m() + direct.empty_groups(), params.m_total);
        }
    }

    #[test]
    fn good_partition_rejects_bad_input() {
        assert!(good_partition(4, 8, 2).is_err());
        assert!(good_partition(8, 4, 1).is_err());
        let p = good_partition(5, 1, 2).unwrap();
        assert_eq!((p.m(), p.r(), p.l()), (5, 1, 0));
    }

    #[test]
    fn restriction() {
        let p = good_partition(16, 16, 2).unwrap();
        assert_eq!(restrict(&p, 16, 16).unwrap(), p);
        let q = restrict(&p, 16, 9).unwrap();
        let rep = verify_partition(&q);
        assert!(rep.ok);
        assert!(rep.l_observed <= 4);
        assert!(q.m() <= p.m());

        let rows = restrict(&row_partition(shape(3, 4)), 3, 2).unwrap();
        assert!(rows.groups().iter().all(|g| g.len() == 2));
        assert!(restrict(&p, 17, 3).is_err());
    }

    #[test]
    fn verification_detects_violations() {
        let mut groups = row_partition(shape(3, 4)).groups().to_vec();
        groups[1].push((0, 0));
        let p = Partition::new(shape(3, 4), groups, 5, 3);
        let rep = verify_partition(&p);
        assert!(!rep.cover_ok && !rep.ok);

        let rows = row_partition(shape(3, 4));
        let p = Partition::new(shape(3, 4), rows.groups().to_vec(), 4, 2);
        let rep = verify_partition(&p);
        assert!(rep.cover_ok && !rep.ok);
        assert_eq!(rep.l_observed, 3);

        // A group meeting one column twice.
        let p = Partition::new(shape(2, 1), vec![vec![(0, 0), (1, 0)]], 2, 0);
        assert!(!verify_partition(&p).columns_ok);
    }

    #[test]
    fn json_layout() {
        let p = singleton_partition(shape(1, 2));
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"s":1,"b":2,"m":2,"r":1,"l":0,"groups":[[[0,0]],[[0,1]]]}"#
        );
    }
}

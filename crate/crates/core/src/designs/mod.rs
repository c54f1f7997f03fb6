//! Block designs from affine geometry.
//!
//! A `(b, r, l)`-design is a family of `r`-subsets of `{0, .., b-1}` such
//! that every unordered pair of points is covered by exactly `l` sets.
//! Indices are 0-based.

mod field;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use field::{is_prime, prime_power_base, FieldOrder, FiniteField, BINARY_MODULI};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Design {
    pub b: usize,
    pub r: usize,
    pub l: usize,
    pub sets: Vec<Vec<usize>>,
}

impl Design {
    pub fn m(&self) -> usize {
        self.sets.len()
    }

    /// Expected number of sets through each point, `l (b-1) / (r-1)`.
    pub fn replication(&self) -> Option<usize> {
        (self.r > 1).then(|| self.l * (self.b - 1) / (self.r - 1))
    }
}

/// All affine lines of `F_r^d`, a `(r^d, r, 1)`-design.
///
/// Point `(c_0, .., c_{d-1})` has index `sum c_i r^i`. Directions are the
/// nonzero vectors whose first nonzero coordinate is 1; lines are sorted by
/// (direction, smallest point on the line).
pub fn affine_line_design(r: u32, d: u32) -> Result<Design> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension d = {d} must be at least 2"
        )));
    }
    let field = FiniteField::new(FieldOrder::new(r)?);
    let r_us = r as usize;
    let b = r_us
        .checked_pow(d)
        .filter(|&b| b <= 1 << 24)
        .ok_or_else(|| Error::InvalidArgument(format!("r^d = {r}^{d} is too large")))?;
    let d = d as usize;

    let coords = |mut idx: usize| -> Vec<u32> {
        (0..d)
            .map(|_| {
                let c = (idx % r_us) as u32;
                idx /= r_us;
                c
            })
            .collect()
    };
    let encode = |c: &[u32]| {
        c.iter()
            .rev()
            .fold(0usize, |acc, &x| acc * r_us + x as usize)
    };

    let mut sets = Vec::with_capacity(r_us.pow(d as u32 - 1) * (b - 1) / (r_us - 1));
    let points: Vec<Vec<u32>> = (0..b).map(coords).collect();
    for dir in points.iter().skip(1) {
        if dir.iter().find(|&&c| c != 0) != Some(&1) {
            continue;
        }
        for (a_idx, a) in points.iter().enumerate() {
            let mut line: Vec<usize> = field
                .elements()
                .map(|t| {
                    let pt: Vec<u32> = a
                        .iter()
                        .zip(dir)
                        .map(|(&ai, &vi)| field.add(ai, field.mul(t, vi)))
                        .collect();
                    encode(&pt)
                })
                .collect();
            line.sort_unstable();
            if line[0] == a_idx {
                sets.push(line);
            }
        }
    }
    Ok(Design {
        b,
        r: r_us,
        l: 1,
        sets,
    })
}

/// Repeats the whole family `h` times, giving a `(b, r, l h)`-design.
/// Copies are concatenated, so set `k` of copy `c` has index `c m + k`.
pub fn repeat_design(design: &Design, h: usize) -> Result<Design> {
    if h == 0 {
        return Err(Error::InvalidArgument(
            "repetition count must be at least 1".into(),
        ));
    }
    let mut sets = Vec::with_capacity(design.sets.len() * h);
    for _ in 0..h {
        sets.extend(design.sets.iter().cloned());
    }
    Ok(Design {
        b: design.b,
        r: design.r,
        l: design.l * h,
        sets,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignReport {
    pub ok: bool,
    pub m: usize,
    /// Common pair multiplicity, `None` when pairs are covered unevenly.
    pub l_observed: Option<usize>,
    /// Common number of sets through each point, `None` when uneven.
    pub replication: Option<usize>,
    pub violations: Vec<String>,
}

/// Exhaustive check of the design definition.
pub fn verify_design(design: &Design) -> DesignReport {
    let mut violations = Vec::new();
    let b = design.b;
    let mut tally = PairTally::new(b);
    let mut point_count = vec![0usize; b];
    for (k, set) in design.sets.iter().enumerate() {
        if set.len() != design.r {
            violations.push(format!(
                "set {k} has size {} (expected {})",
                set.len(),
                design.r
            ));
        }
        if let Some(&p) = set.iter().find(|&&p| p >= b) {
            violations.push(format!("set {k} contains point {p} outside [0, {b})"));
            continue;
        }
        let mut sorted = set.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            violations.push(format!("set {k} repeats a point"));
            continue;
        }
        for &p in &sorted {
            point_count[p] += 1;
        }
        tally.add_set(&sorted);
    }

    let (min, max) = tally.min_max();
    let l_observed = (min == max).then_some(max);
    match l_observed {
        Some(l) if l != design.l => {
            violations.push(format!(
                "pairs covered {l} times, declared l = {}",
                design.l
            ));
        }
        Some(_) => {}
        None => violations.push(format!("pair multiplicity ranges over [{min}, {max}]")),
    }
    let replication = match (point_count.iter().min(), point_count.iter().max()) {
        (Some(lo), Some(hi)) if lo == hi => Some(*lo),
        _ => None,
    };
    DesignReport {
        ok: violations.is_empty(),
        m: design.sets.len(),
        l_observed,
        replication,
        violations,
    }
}

/// Counts how many sets cover each unordered pair `{j1, j2}` of `[b]`.
pub(crate) struct PairTally {
    b: usize,
    counts: PairStore,
}

enum PairStore {
    Dense(Vec<u32>),
    Sparse(HashMap<(u32, u32), u32>),
}

const DENSE_LIMIT: usize = 4096;

/// Row-major upper triangle without the diagonal, `lo < hi`.
#[inline]
fn triangle_slot(b: usize, lo: usize, hi: usize) -> usize {
    lo * (2 * b - lo - 1) / 2 + (hi - lo - 1)
}

impl PairTally {
    pub(crate) fn new(b: usize) -> Self {
        let counts = if b <= DENSE_LIMIT {
            PairStore::Dense(vec![0; b * b.saturating_sub(1) / 2])
        } else {
            PairStore::Sparse(HashMap::new())
        };
        PairTally { b, counts }
    }

    /// Adds every pair of the sorted, duplicate-free `points`.
    pub(crate) fn add_set(&mut self, points: &[usize]) {
        let b = self.b;
        for (a, &lo) in points.iter().enumerate() {
            for &hi in &points[a + 1..] {
                match &mut self.counts {
                    PairStore::Dense(v) => v[triangle_slot(b, lo, hi)] += 1,
                    PairStore::Sparse(map) => *map.entry((lo as u32, hi as u32)).or_insert(0) += 1,
                }
            }
        }
    }

    /// Smallest and largest count over all `b (b-1) / 2` pairs.
    pub(crate) fn min_max(&self) -> (usize, usize) {
        let total = self.b * self.b.saturating_sub(1) / 2;
        match &self.counts {
            PairStore::Dense(v) => (
                v.iter().copied().min().unwrap_or(0) as usize,
                v.iter().copied().max().unwrap_or(0) as usize,
            ),
            PairStore::Sparse(map) => {
                let max = map.values().copied().max().unwrap_or(0) as usize;
                let min = if map.len() < total {
                    0
                } else {
                    map.values().copied().min().unwrap_or(0) as usize
                };
                (min, max)
            }
        }
    }

    pub(crate) fn max(&self) -> usize {
        self.min_max().1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_pair_counts(design: &Design) -> Vec<Vec<usize>> {
        let mut c = vec![vec![0; design.b]; design.b];
        for set in &design.sets {
            for &a in set {
                for &b in set {
                    if a != b {
                        c[a][b] += 1;
                    }
                }
            }
        }
        c
    }

    #[test]
    fn affine_plane_of_order_two() {
        let d = affine_line_design(2, 2).unwrap();
        assert_eq!((d.b, d.r, d.l, d.m()), (4, 2, 1, 6));
        // Every pair of the 4 points is a line.
        assert_eq!(
            d.sets,
            vec![
                vec![0, 1],
                vec![2, 3],
                vec![0, 2],
                vec![1, 3],
                vec![0, 3],
                vec![1, 2]
            ]
        );
        let report = verify_design(&d);
        assert!(report.ok);
        assert_eq!(report.l_observed, Some(1));
        assert_eq!(report.replication, Some(3));
    }

    #[test]
    fn small_designs_match_brute_force() {
        for (r, dim, m, rep) in [(3, 2, 12, 4), (2, 3, 28, 7), (4, 2, 20, 5)] {
            let d = affine_line_design(r, dim).unwrap();
            assert_eq!(d.m(), m);
            let counts = brute_pair_counts(&d);
            for a in 0..d.b {
                for b in 0..d.b {
                    if a != b {
                        assert_eq!(counts[a][b], 1, "r={r} d={dim} pair {a},{b}");
                    }
                }
                assert_eq!(d.sets.iter().filter(|s| s.contains(&a)).count(), rep);
            }
            let report = verify_design(&d);
            assert!(report.ok, "{:?}", report.violations);
            assert_eq!(report.replication, Some(rep));
        }
    }

    #[test]
    fn invariant_grid() {
        for r in [2u32, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            for dim in [2u32, 3] {
                let b = (r as usize).pow(dim);
                if b > 4096 {
                    continue;
                }
                let d = affine_line_design(r, dim).unwrap();
                let ru = r as usize;
                assert_eq!(d.m(), ru.pow(dim - 1) * (b - 1) / (ru - 1));
                let report = verify_design(&d);
                assert!(report.ok, "r={r} d={dim}: {:?}", report.violations);
                assert_eq!(report.l_observed, Some(1));
                assert_eq!(report.replication, Some((b - 1) / (ru - 1)));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            affine_line_design(2, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert_eq!(affine_line_design(6, 2), Err(Error::NotPrimePower(6)));
    }

    #[test]
    fn repetition() {
        let d = affine_line_design(2, 2).unwrap();
        assert_eq!(repeat_design(&d, 1).unwrap(), d);
        let d3 = repeat_design(&d, 3).unwrap();
        assert_eq!((d3.m(), d3.l), (18, 3));
        let report = verify_design(&d3);
        assert!(report.ok);
        assert_eq!(report.l_observed, Some(3));
        assert_eq!(report.replication, Some(3 * (4 - 1) / (2 - 1)));
        assert!(repeat_design(&d, 0).is_err());
    }

    #[test]
    fn detects_broken_designs() {
        let mut d = affine_line_design(3, 2).unwrap();
        d.sets.pop();
        let report = verify_design(&d);
        assert!(!report.ok);
        assert_eq!(report.l_observed, None);

        let mut d = affine_line_design(2, 2).unwrap();
        d.sets[0] = vec![0, 1, 2];
        assert!(!verify_design(&d).ok);
    }

    #[test]
    fn sparse_tally_agrees_with_dense() {
        let d = affine_line_design(3, 2).unwrap();
        let mut dense = PairTally::new(d.b);
        let mut sparse = PairTally {
            b: d.b,
            counts: PairStore::Sparse(HashMap::new()),
        };
        for s in &d.sets[1..] {
            dense.add_set(s);
            sparse.add_set(s);
        }
        assert_eq!(dense.min_max(), sparse.min_max());
    }
}

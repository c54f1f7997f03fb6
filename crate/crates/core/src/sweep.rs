//! Seeded measurement of the approximation pipeline over block sizes.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{d0_mixed, one_column_sign_points, sample_ball, BlockMatrix, BlockShape};
use crate::partitions::good_partition;
use crate::spread::{
    approximate, approximate_grouped, choose_params, transposition_partition, ApproxResult,
    GroupedOperator, PipelineParams, SpreadOperator,
};
use crate::widths::Tuple;

/// Which partition the pipeline runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionChoice {
    /// Good partition for `s >= b`, grouped construction for `s < b`.
    Good,
    /// Transposition partition; needs `s = b`.
    Transposition,
}

impl FromStr for PartitionChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "good" => Ok(PartitionChoice::Good),
            "transposition" | "transpose" => Ok(PartitionChoice::Transposition),
            other => Err(Error::InvalidArgument(format!(
                "unknown partition `{other}` (expected `good` or `transposition`)"
            ))),
        }
    }
}

/// One row of a sweep table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeMeasurement {
    pub s: usize,
    pub b: usize,
    pub d: u32,
    pub k: usize,
    /// Largest declared group size over the partitions used.
    pub r: usize,
    /// Largest declared pair bound over the partitions used.
    pub l: usize,
    pub dim: usize,
    pub d0: f64,
    pub sup_sampled_error: f64,
    pub ratio: f64,
    /// Largest certified bound over the samples.
    pub certified_bound: f64,
}

/// Spreading operator(s) for one size.
pub enum SizeOperator {
    Single(SpreadOperator),
    Grouped(GroupedOperator),
}

impl SizeOperator {
    pub fn build(s: usize, b: usize, d: u32, choice: PartitionChoice) -> Result<Self> {
        match choice {
            PartitionChoice::Transposition => {
                if s != b {
                    return Err(Error::InvalidArgument(format!(
                        "transposition partition needs s = b (got {s}x{b})"
                    )));
                }
                Ok(SizeOperator::Single(SpreadOperator::new(
                    transposition_partition(s)?,
                )?))
            }
            PartitionChoice::Good if s >= b => Ok(SizeOperator::Single(SpreadOperator::new(
                good_partition(s, b, d)?,
            )?)),
            PartitionChoice::Good => Ok(SizeOperator::Grouped(GroupedOperator::new(s, b, d)?)),
        }
    }

    pub fn run(&self, x: &BlockMatrix, params: &PipelineParams) -> Result<ApproxResult> {
        match self {
            SizeOperator::Single(op) => approximate(x, params, op),
            SizeOperator::Grouped(op) => approximate_grouped(x, params, op).map(|g| g.combined),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            SizeOperator::Single(op) => op.dimension(),
            SizeOperator::Grouped(op) => op.dimension(),
        }
    }

    /// Largest declared `(r, l)` over the partitions.
    pub fn params(&self) -> (usize, usize) {
        match self {
            SizeOperator::Single(op) => (op.partition().r(), op.partition().l()),
            SizeOperator::Grouped(op) => op.groups().fold((0, 0), |(r, l), (_, g)| {
                (r.max(g.partition().r()), l.max(g.partition().l()))
            }),
        }
    }
}

/// SplitMix64 finalizer, used to derive per-size seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the samples of size `(s, b)`; independent of the order in
/// which sizes are visited.
pub fn size_seed(seed: u64, s: usize, b: usize) -> u64 {
    mix(mix(seed) ^ ((s as u64) << 32) ^ b as u64)
}

/// Runs the pipeline on `samples` one-column sign points and `samples`
/// ball points and records the largest error.
#[allow(clippy::too_many_arguments)]
pub fn measure_size(
    tuple: Tuple,
    s: usize,
    b: usize,
    choice: PartitionChoice,
    samples: usize,
    seed: u64,
    d: Option<u32>,
    k: Option<usize>,
) -> Result<SizeMeasurement> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let Tuple { p1, p2, q1, q2 } = tuple;
    let shape = BlockShape::new(s, b)?;
    let params = choose_params(p1, p2, q1, q2, s, b)?.with_overrides(d, k)?;
    let op = SizeOperator::build(s, b, params.d, choice)?;
    let base = size_seed(seed, s, b);
    let mut points = one_column_sign_points(shape, p1, base, samples);
    points.extend(sample_ball(shape, p1, p2, mix(base), samples));

    let mut sup_error = 0.0f64;
    let mut sup_bound = 0.0f64;
    for x in &points {
        let res = op.run(x, &params)?;
        sup_error = sup_error.max(res.measured_error);
        sup_bound = sup_bound.max(res.certified_bound);
    }
    let d0 = d0_mixed(shape, p1, p2, q1, q2);
    let (r, l) = op.params();
    Ok(SizeMeasurement {
        s,
        b,
        d: params.d,
        k: params.k,
        r,
        l,
        dim: op.dimension(),
        d0,
        sup_sampled_error: sup_error,
        ratio: sup_error / d0,
        certified_bound: sup_bound,
    })
}

/// Sweep configuration shared by the CLI and the bindings.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub tuple: Tuple,
    pub sizes: Vec<(usize, usize)>,
    pub partition: PartitionChoice,
    pub samples: usize,
    pub seed: u64,
    pub d: Option<u32>,
    pub k: Option<usize>,
}

/// One row per size, in the order given.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SizeMeasurement>> {
    if config.sizes.is_empty() {
        return Err(Error::InvalidArgument("sizes must not be empty".into()));
    }
    config
        .sizes
        .iter()
        .map(|&(s, b)| {
            measure_size(
                config.tuple,
                s,
                b,
                config.partition,
                config.samples,
                config.seed,
                config.d,
                config.k,
            )
        })
        .collect()
}

//! Seeded samplers for points of mixed-norm unit balls.
//!
//! Uniformity on the sphere is not claimed; every sample is a member of
//! the ball, and even-indexed samples lie on its boundary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use super::{mixed_norm, norm, pow_rational, BlockMatrix, BlockShape, Exponent, MixedNormParams};
use crate::error::{Error, Result};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric draw with density proportional to `exp(-|t|^p)`; uniform on
/// `[-1, 1]` for `p = inf`.
fn exp_power<R: Rng>(rng: &mut R, p: Exponent, gamma: Option<&Gamma<f64>>) -> f64 {
    match gamma {
        None => rng.random_range(-1.0..=1.0),
        Some(g) => {
            let mag = g.sample(rng).powf(p.recip_f64());
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        }
    }
}

fn gamma_for(p: Exponent) -> Option<Gamma<f64>> {
    (!p.is_infinite()).then(|| Gamma::new(p.recip_f64(), 1.0).expect("shape 1/p is positive"))
}

/// A direction on the unit `l_p` sphere of dimension `len`.
fn sphere_direction<R: Rng>(
    rng: &mut R,
    len: usize,
    p: Exponent,
    gamma: Option<&Gamma<f64>>,
) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| exp_power(rng, p, gamma)).collect();
        let n = norm(&v, p);
        if n > 0.0 {
            return v.into_iter().map(|t| t / n).collect();
        }
    }
}

/// Rescales `x` to unit mixed norm.
pub fn normalize(x: &BlockMatrix, params: MixedNormParams) -> Result<BlockMatrix> {
    let n = mixed_norm(x, params);
    if n == 0.0 {
        return Err(Error::ZeroNormalization);
    }
    Ok(x.scale(1.0 / n))
}

/// `count` seeded points of the unit ball of `||.||_{p1,p2}`.
///
/// Each block direction is drawn on the inner `l_{p1}` sphere and the block
/// profile on the outer `l_{p2}` sphere. Even-indexed samples are returned
/// on the boundary; odd-indexed ones are scaled by `u^{1/N}`.
pub fn sample_ball(
    shape: BlockShape,
    p1: Exponent,
    p2: Exponent,
    seed: u64,
    count: usize,
) -> Vec<BlockMatrix> {
    let mut rng = seeded_rng(seed);
    let (g1, g2) = (gamma_for(p1), gamma_for(p2));
    let params = MixedNormParams::new(p1, p2);
    let n = shape.n() as f64;
    (0..count)
        .map(|idx| {
            let profile: Vec<f64> = sphere_direction(&mut rng, shape.b, p2, g2.as_ref())
                .into_iter()
                .map(f64::abs)
                .collect();
            let mut entries = Vec::with_capacity(shape.n());
            for &w in &profile {
                let dir = sphere_direction(&mut rng, shape.s, p1, g1.as_ref());
                entries.extend(dir.into_iter().map(|t| t * w));
            }
            let x = BlockMatrix { shape, entries };
            let radius = if idx % 2 == 0 {
                1.0
            } else {
                rng.random::<f64>().powf(1.0 / n)
            };
            let unit = normalize(&x, params).expect("profile has unit norm");
            let mut out = unit.scale(radius);
            // Rounding can leave the norm a few ulps above the radius.
            let excess = mixed_norm(&out, params);
            if excess > radius {
                out = out.scale(radius / excess);
            }
            out
        })
        .collect()
}

/// Matrices supported on one column with `+-c` entries, `c = s^{-1/p1}`, so
/// each has unit `l_{p1}` column norm. For `p1 = inf` these are the
/// extreme points of the unit ball of `||.||_{inf,1}`.
pub fn one_column_sign_points(
    shape: BlockShape,
    p1: Exponent,
    seed: u64,
    count: usize,
) -> Vec<BlockMatrix> {
    let mut rng = seeded_rng(seed);
    let c = 1.0 / pow_rational(shape.s as f64, p1.recip());
    (0..count)
        .map(|_| {
            let j = rng.random_range(0..shape.b);
            let mut x = BlockMatrix::zeros(shape);
            for i in 0..shape.s {
                let sign = if rng.random_bool(0.5) { c } else { -c };
                x.set(i, j, sign);
            }
            x
        })
        .collect()
}

/// Extreme points of the unit ball of `||.||_{inf,1}`: one nonzero column
/// with `+-1` entries.
pub fn extreme_points_inf1(shape: BlockShape, seed: u64, count: usize) -> Vec<BlockMatrix> {
    one_column_sign_points(shape, Exponent::INFINITY, seed, count)
}

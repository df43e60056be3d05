//! Deterministic sample grids inside the unit ball.
//!
//! Every residual check in this crate evaluates identities on a fixed,
//! seeded set of interior points so that reports are reproducible run to
//! run. Components are drawn uniformly from a box scaled so the whole
//! vector is guaranteed to satisfy `|z| <= radius`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CVec;

/// Seed shared by all default sample grids.
pub const DEFAULT_SEED: u64 = 0xB411;

/// Default radius for residual sample points; kernel magnitudes stay
/// moderate well inside the ball.
pub const DEFAULT_RADIUS: f64 = 0.6;

/// Default number of (z, w) pairs for kernel-identity residuals.
pub const DEFAULT_SAMPLE_COUNT: usize = 100;

/// Draws one complex vector with `|z| <= radius`.
pub fn ball_point<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> CVec {
    let s = radius / ((2 * dim) as f64).sqrt();
    DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.random_range(-s..s), rng.random_range(-s..s))
    })
}

/// A seeded grid of `count` interior points.
pub fn ball_grid(count: usize, dim: usize, radius: f64, seed: u64) -> Vec<CVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| ball_point(&mut rng, dim, radius)).collect()
}

/// A seeded grid of `count` pairs of interior points, for two-point
/// kernel identities.
pub fn ball_pair_grid(count: usize, dim: usize, radius: f64, seed: u64) -> Vec<(CVec, CVec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (ball_point(&mut rng, dim, radius), ball_point(&mut rng, dim, radius)))
        .collect()
}

/// The default (z, w) sample set used by kernel residuals.
pub fn default_pair_grid(dim: usize) -> Vec<(CVec, CVec)> {
    ball_pair_grid(DEFAULT_SAMPLE_COUNT, dim, DEFAULT_RADIUS, DEFAULT_SEED)
}

//! Deterministic sample generation.
//!
//! Every randomized check draws its points from a counter-based generator
//! keyed by an explicit seed, so any witness can be replayed from the seed
//! alone. Distinct point batches for one seed use distinct generator streams,
//! which keeps batches independent without consuming shared state.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::linalg::Vector;

/// How a batch of sample points is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    /// Seed for the generator; equal seeds reproduce equal batches.
    pub seed: u64,
    /// Number of points in the batch.
    pub count: usize,
    /// Ambient dimension of each point.
    pub dim: usize,
    /// Points are isotropic Gaussian with this standard deviation.
    pub scale: f64,
}

impl SampleConfig {
    pub fn new(seed: u64, count: usize, dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 {
            return Err(CoreError::InvalidParameter {
                what: "sample dimension",
                why: "must be positive".into(),
            });
        }
        if count == 0 {
            return Err(CoreError::InvalidParameter {
                what: "sample count",
                why: "must be positive".into(),
            });
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(CoreError::InvalidParameter {
                what: "sample scale",
                why: format!("must be finite and positive, got {scale}"),
            });
        }
        Ok(SampleConfig { seed, count, dim, scale })
    }

    /// Same configuration pointing at a different stream.
    pub fn with_stream(self, stream: u64) -> StreamedSampler {
        StreamedSampler { config: self, stream }
    }
}

/// A sample batch bound to one generator stream.
#[derive(Debug, Clone, Copy)]
pub struct StreamedSampler {
    config: SampleConfig,
    stream: u64,
}

impl StreamedSampler {
    pub fn draw(&self) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(self.stream);
        (0..self.config.count)
            .map(|_| gaussian_point(&mut rng, self.config.dim, self.config.scale))
            .collect()
    }
}

fn gaussian_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vector {
    let entries: Vec<f64> = (0..dim)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Vector::new(entries).expect("Gaussian draws are finite")
}

/// Stream indices reserved by the checkers. Streams 0 and 1 carry the two
/// point batches of pairwise checks, streams 2 and 3 carry scalar
/// coefficients, and streams 10 and up carry tuple batches indexed by
/// tuple length.
pub const STREAM_X: u64 = 0;
pub const STREAM_Y: u64 = 1;
pub const STREAM_COEFF: u64 = 2;
pub const STREAM_UNIFORM: u64 = 3;
pub const STREAM_TUPLE_BASE: u64 = 10;

/// Primary batch of points for a check.
pub fn sample_points(config: &SampleConfig) -> Vec<Vector> {
    config.with_stream(STREAM_X).draw()
}

/// Companion batch, independent of [`sample_points`] for the same seed.
pub fn sample_companion_points(config: &SampleConfig) -> Vec<Vector> {
    config.with_stream(STREAM_Y).draw()
}

/// Batch of standard-normal scalar coefficients (unscaled).
pub fn sample_normal_scalars(config: &SampleConfig) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(STREAM_COEFF);
    (0..config.count)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Batch of scalars uniform on [lo, hi].
pub fn sample_uniform_scalars(config: &SampleConfig, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(STREAM_UNIFORM);
    (0..config.count).map(|_| rng.random_range(lo..hi)).collect()
}

/// Batch of `count` tuples of `n` points each, for cycle-style checks.
pub fn sample_tuples(config: &SampleConfig, n: usize) -> Vec<Vec<Vector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(STREAM_TUPLE_BASE + n as u64);
    (0..config.count)
        .map(|_| {
            (0..n)
                .map(|_| gaussian_point(&mut rng, config.dim, config.scale))
                .collect()
        })
        .collect()
}

//! Deterministic Monte Carlo harness: counter-based per-chunk seeding,
//! trial streaming, and Welford moment accumulation.
//!
//! The sample stream is a pure function of `(master_seed, chunk layout)`,
//! never of the worker count: each chunk owns an independent RNG seeded
//! from the master seed and the chunk index, and chunk accumulators are
//! merged in chunk order.

use crate::pairmodel::{sample_pair, PairSample, SourceConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Default master seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

pub const DEFAULT_CHUNK_SIZE: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunSpec {
    pub n_trials: u64,
    pub master_seed: u64,
    pub chunk_size: u64,
}

impl RunSpec {
    pub fn new(n_trials: u64, master_seed: u64) -> Self {
        Self {
            n_trials,
            master_seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }
}

/// Streaming mean/variance accumulator (Welford form).
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    /// Chan's pairwise merge; associative and commutative up to rounding.
    pub fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Self { count, mean, m2 }
    }

    /// Sample variance; 0 for fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// SplitMix64-style mix of the master seed and a stream index; adjacent
/// indices give uncorrelated ChaCha seeds.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunk_rng(master_seed: u64, chunk_index: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(master_seed, chunk_index.wrapping_add(1)))
}

fn chunk_len(spec: &RunSpec, chunk_index: u64) -> u64 {
    let start = chunk_index * spec.chunk_size;
    spec.chunk_size.min(spec.n_trials - start)
}

/// Mean and standard error of `per_trial_fn` over the sample stream.
///
/// Chunks run data-parallel; the reported moments are identical for any
/// worker count because accumulators are merged in chunk order.
pub fn run_ensemble<F>(spec: &RunSpec, config: &SourceConfig, per_trial_fn: F) -> crate::Result<Accumulator>
where
    F: Fn(&PairSample) -> f64 + Sync,
{
    if spec.n_trials == 0 {
        return Err(crate::Error::EmptyEnsemble);
    }
    let chunk_size = spec.chunk_size.max(1);
    let spec = RunSpec { chunk_size, ..*spec };
    let n_chunks = spec.n_trials.div_ceil(chunk_size);
    let chunk_accs: Vec<Accumulator> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(spec.master_seed, chunk);
            let mut acc = Accumulator::default();
            for _ in 0..chunk_len(&spec, chunk) {
                let sample = sample_pair(config, &mut rng);
                acc.push(per_trial_fn(&sample));
            }
            acc
        })
        .collect();
    Ok(chunk_accs.into_iter().fold(Accumulator::default(), Accumulator::merge))
}

/// The exact sample sequence an ensemble run consumes, in chunk order.
pub fn sample_stream(spec: &RunSpec, config: &SourceConfig) -> Vec<PairSample> {
    let chunk_size = spec.chunk_size.max(1);
    let spec = RunSpec { chunk_size, ..*spec };
    let n_chunks = spec.n_trials.div_ceil(chunk_size);
    let mut samples = Vec::with_capacity(spec.n_trials as usize);
    for chunk in 0..n_chunks {
        let mut rng = chunk_rng(spec.master_seed, chunk);
        for _ in 0..chunk_len(&spec, chunk) {
            samples.push(sample_pair(config, &mut rng));
        }
    }
    samples
}

//! Seeded randomness shared by every mechanism.
//!
//! All draws go through [`RandomSource`], a thin wrapper over ChaCha8 so that
//! a `(seed, stream)` pair pins down every bit a run consumes. Each helper
//! documents how many raw 64-bit words it takes from the stream.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const TWO_POW_MINUS_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Same key as `new(seed)`, but an independent ChaCha stream.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, rng }
    }

    /// Source for trial `index` of a run seeded with `seed`.
    pub fn for_trial(seed: u64, index: u64) -> Self {
        Self::new(seed.wrapping_add(index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution. One word.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * TWO_POW_MINUS_53
    }

    /// Uniform in `[2^-53, 1 - 2^-53]`, never 0 or 1. One word.
    pub fn open_uniform(&mut self) -> f64 {
        let k = (self.rng.next_u64() >> 11).max(1);
        k as f64 * TWO_POW_MINUS_53
    }

    /// Uniform in `[lo, hi)`; returns `lo` when the interval is empty. One word.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.uniform();
        if hi <= lo {
            return lo;
        }
        let x = lo + u * (hi - lo);
        // lo + u*(hi-lo) can round up to hi
        if x >= hi {
            lo.max(hi - (hi - lo) * f64::EPSILON)
        } else {
            x
        }
    }

    /// Standard Laplace draw by inverse CDF. One word.
    pub fn laplace(&mut self) -> f64 {
        let u = self.open_uniform() - 0.5;
        -u.signum() * (1.0 - 2.0 * u.abs()).ln()
    }

    /// Standard normal draw (ziggurat from `rand_distr`); word count varies.
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

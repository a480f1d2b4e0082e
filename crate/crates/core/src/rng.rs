//! Deterministic, counter-addressable random streams.
//!
//! Every random draw in a run is addressed by `(seed, stream, index)`:
//! the seed comes from the run configuration, the stream id is derived
//! from a purpose domain plus an instance index (trial number, pixel
//! index, ...), and the index is the position within the stream. Streams
//! are backed by ChaCha8, whose independent-stream and word-position
//! addressing make any draw reachable without generating its
//! predecessors. Results are therefore identical no matter how work is
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default seed used when a run does not specify one.
pub const DEFAULT_SEED: u64 = 0xA25C_0DE5;

/// Purpose domains for stream derivation. Two draws from different
/// domains never share a stream.
pub mod domains {
    /// Monte-Carlo switching trials.
    pub const MONTE_CARLO: u64 = 0x01;
    /// Converter bit-stream generation.
    pub const BITSTREAM: u64 = 0x02;
    /// Calibration measurements.
    pub const CALIBRATION: u64 = 0x03;
    /// Gaussian resistance-deviation sampling.
    pub const VARIABILITY: u64 = 0x04;
    /// Edge detector: shared source of the main-diagonal pixel pair.
    pub const EDGE_DIAG_MAIN: u64 = 0x10;
    /// Edge detector: shared source of the anti-diagonal pixel pair.
    pub const EDGE_DIAG_ANTI: u64 = 0x11;
    /// Edge detector: select stream of the scaled adder.
    pub const EDGE_SELECT: u64 = 0x12;
    /// Edge detector: bit-flip noise on the four input streams.
    pub const EDGE_NOISE: u64 = 0x13;
    /// Binary reference pipeline: bit-flip noise on quantized pixels.
    pub const BINARY_NOISE: u64 = 0x14;
    /// General-purpose streams for tests and ad-hoc sampling.
    pub const SCRATCH: u64 = 0x7f;
}

/// Address of one random stream: a run seed plus a derived stream id.
///
/// Keys compare by value; two equal keys always reproduce the same
/// uniform sequence. That is what "correlated" means for bit streams:
/// they were encoded against the same key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    seed: u64,
    stream: u64,
}

impl StreamKey {
    /// Root key of a run.
    pub fn root(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    /// Derive the stream for `(domain, index)` under this key's seed.
    pub fn derive(self, domain: u64, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(splitmix64(domain) ^ index),
        }
    }

    /// The run seed this key belongs to.
    pub fn seed(self) -> u64 {
        self.seed
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(self) -> StreamRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(self.stream);
        StreamRng { inner }
    }
}

/// One sequential random stream.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random()
    }

    /// Bernoulli draw: true with probability `p`. Consumes one uniform.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Standard normal draw via Box-Muller. Consumes two uniforms.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

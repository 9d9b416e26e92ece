//! Deterministic random streams.
//!
//! Every stochastic quantity is drawn from a ChaCha8 stream keyed by
//! `(seed, realization, purpose)`, so replay never depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator handed to every sampler in the crate.
pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Circuit,
    Measurements,
    Outcomes,
    Sampling,
    Custom(u64),
}

impl Purpose {
    fn code(self) -> u64 {
        match self {
            Purpose::Circuit => 1,
            Purpose::Measurements => 2,
            Purpose::Outcomes => 3,
            Purpose::Sampling => 4,
            Purpose::Custom(c) => 0x1000 ^ c.rotate_left(17),
        }
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a master seed and a list of indices into a single 64-bit seed.
pub fn derive_seed(master: u64, indices: &[u64]) -> u64 {
    indices
        .iter()
        .fold(splitmix64(master), |acc, &i| splitmix64(acc ^ splitmix64(i.wrapping_add(0x5851_F42D_4C95_7F2D))))
}

/// Factory for independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub realization: u64,
}

impl RngStream {
    pub fn new(seed: u64, realization: u64) -> Self {
        Self { seed, realization }
    }

    /// The generator for one purpose of this realization.
    pub fn rng(&self, purpose: Purpose) -> StreamRng {
        let words = [
            splitmix64(self.seed),
            splitmix64(self.realization ^ 0xA076_1D64_78BD_642F),
            splitmix64(purpose.code()),
            derive_seed(self.seed, &[self.realization, purpose.code()]),
        ];
        let mut key = [0u8; 32];
        for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

/// Shorthand for `RngStream::new(seed, 0).rng(purpose)`.
pub fn stream(seed: u64, purpose: Purpose) -> StreamRng {
    RngStream::new(seed, 0).rng(purpose)
}

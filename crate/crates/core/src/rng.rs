//! Seeded, stream-separated random number generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// 64-bit seed. Every sampling routine derives its own generator from a seed
/// plus a stream identifier, so no generator state is ever shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    /// Generator for the given stream. Distinct streams under one seed are
    /// independent; the same (seed, stream) pair replays bit-for-bit.
    pub fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }

    /// Child seed for an independent sub-task (e.g. a replicate run).
    pub fn derive(self, tag: u64) -> RngSeed {
        // splitmix64 finaliser
        let mut z = self.0 ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        Self(v)
    }
}

/// Stream identifiers used across the crate.
pub(crate) mod streams {
    /// Candidate pool for selection iteration `i` is `POOL + i`.
    pub const POOL: u64 = 1 << 32;
    pub const MONTE_CARLO: u64 = 2 << 32;
    pub const DIRECT: u64 = 0;
}

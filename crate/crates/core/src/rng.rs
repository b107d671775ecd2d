//! Deterministic, portable randomness.
//!
//! Every random stream is a ChaCha8 generator keyed by the 64-bit master
//! seed (expanded with `SeedableRng::seed_from_u64`) and selected by a 64-bit
//! stream id built from a purpose tag and an item index. Streams never
//! overlap, so work items can run in any order and still draw identical
//! numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Master seed. The same seed reproduces every downstream draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

/// Purpose tags. Each gets its own family of streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamKind {
    Augment = 1,
    Phantom = 2,
    Coords = 3,
    Heatmaps = 4,
    Corpus = 5,
}

impl RngSeed {
    /// Independent stream for item `index` of the given purpose.
    pub fn stream(self, kind: StreamKind, index: u64) -> ChaCha8Rng {
        debug_assert!(index < 1 << 56);
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(((kind as u64) << 56) | (index & ((1 << 56) - 1)));
        rng
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}

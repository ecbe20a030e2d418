//! Reproducible random streams.
//!
//! Every random draw in the library comes from a [`StreamSeed`], a 64-bit key
//! that can spawn children by index. Children are derived by mixing the
//! parent key with the index, so the stream handed to trial `i` depends only
//! on the root seed and the path of indices leading to it. Work can therefore
//! be split across any number of workers without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Generator used for all sampling.
pub type Rng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamSeed(u64);

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamSeed {
    pub fn new(root: u64) -> Self {
        StreamSeed(root)
    }

    pub fn key(self) -> u64 {
        self.0
    }

    /// Derive the seed of child `index`.
    pub fn child(self, index: u64) -> Self {
        let a = splitmix64(self.0);
        StreamSeed(splitmix64(a ^ splitmix64(index.wrapping_mul(GOLDEN) ^ 0x5851_F42D_4C95_7F2D)))
    }

    /// Derive a child from a string tag, for named sub-streams.
    pub fn named(self, tag: &str) -> Self {
        // FNV-1a over the tag bytes.
        let h = tag
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        self.child(h)
    }

    pub fn rng(self) -> Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for StreamSeed {
    fn from(root: u64) -> Self {
        StreamSeed::new(root)
    }
}

/// Run `f` on a rayon pool with exactly `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    let workers = workers.max(1);
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

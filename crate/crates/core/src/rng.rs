//! Seeded random streams.
//!
//! Every stochastic choice in the crate draws from a ChaCha8 generator seeded
//! with the run seed and a fixed per-component stream id, so one seed
//! determines all shuffles, initializations and dropout masks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream ids. Values are part of the reproducibility contract; do not renumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 1,
    Shuffle = 2,
    Dropout = 3,
    Subsample = 4,
    Synthetic = 5,
}

pub fn stream(seed: u64, stream: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

//! Seeded random streams.
//!
//! Every random quantity is drawn from a ChaCha8 generator keyed by a 64-bit
//! seed and a stream id, so a draw depends only on its coordinates and never on
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids for the independent draws inside one replication.
pub mod stream {
    pub const LATENT: u64 = 1;
    pub const OBSERVE: u64 = 2;
    pub const NOISE: u64 = 3;
    pub const POWER_START: u64 = 4;
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep` of cell `cell` under `master`.
pub fn replication_seed(master: u64, cell: u64, rep: u64) -> u64 {
    mix(mix(mix(master) ^ cell) ^ rep)
}

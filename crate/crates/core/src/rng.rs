//! Seed splitting.
//!
//! Every random draw in a run derives from one 64-bit seed. ChaCha is a
//! counter-based generator, so independent consumers get their own stream
//! number instead of sharing (and reordering) one sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids for the consumers of a run seed.
pub mod streams {
    pub const AWGN: u64 = 1;
    pub const GAIN_SCHEDULE: u64 = 2;
    pub const PAYLOAD: u64 = 3;
    pub const STIMULUS: u64 = 4;
}

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

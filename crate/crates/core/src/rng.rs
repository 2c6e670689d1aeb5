//! Seeded random streams.
//!
//! All randomness flows through ChaCha20 (`rand_chacha`), whose output is
//! specified bit-for-bit and therefore identical on every platform. A stream
//! is addressed by `(seed, stream id)`, so case `i` of a suite draws the same
//! numbers whether cases run serially or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

pub fn stream(seed: u64, id: u64) -> Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// A sub-stream keyed by two indices, e.g. (case, term).
pub fn substream(seed: u64, id: u64, sub: u64) -> Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ sub.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(id);
    rng
}

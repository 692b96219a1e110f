//! The one random generator used throughout the crate.
//!
//! Every randomized step draws from ChaCha8 seeded through
//! [`SeedableRng::seed_from_u64`]. ChaCha8 output is specified bit-for-bit and
//! does not depend on the platform, so identical seeds reproduce identical
//! estimates on every machine.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Generator = ChaCha8Rng;

/// Name recorded in stage traces next to every seed.
pub const GENERATOR_NAME: &str = "chacha8";

pub fn generator(seed: u64) -> Generator {
    ChaCha8Rng::seed_from_u64(seed)
}

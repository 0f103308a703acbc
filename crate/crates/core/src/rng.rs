//! Seeded random streams.
//!
//! Every stochastic component draws from its own ChaCha8 stream derived from
//! the run seed, so adding draws in one component never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream identifiers for the components of a training run.
pub mod streams {
    pub const ACTOR_INIT: u64 = 1;
    pub const CRITIC_INIT: u64 = 2;
    pub const MINIBATCH: u64 = 3;
    pub const ACTOR_LATENTS: u64 = 4;
    pub const CRITIC_LATENTS: u64 = 5;
    pub const EVAL: u64 = 6;
    pub const DATASET: u64 = 7;
    pub const PROBE: u64 = 8;
    pub const DIAGNOSTICS: u64 = 9;
}

/// Generator for `seed` positioned on an independent `stream`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

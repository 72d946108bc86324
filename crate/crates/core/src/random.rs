//! Seeded random streams.
//!
//! Every consumer of randomness derives its own ChaCha stream from the run
//! seed, a domain tag and an index, so adding or reordering consumers never
//! perturbs the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u16)]
pub enum Domain {
    Permutation = 1,
    CatPermutation = 2,
    Bootstrap = 3,
    TreeSampling = 4,
    Split = 5,
    Holdout = 6,
    MonteCarlo = 7,
    Synthetic = 8,
    Experiment = 9,
}

pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 48) ^ (index & 0xFFFF_FFFF_FFFF));
    rng
}

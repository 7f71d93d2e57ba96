//! Seeded random streams.
//!
//! Every random stream in the workbench is a `Xoshiro256PlusPlus` generator
//! seeded from a 64-bit value. Child streams are derived by hashing a master
//! seed together with an index path through the SplitMix64 finalizer, so a
//! trial's stream depends only on `(master_seed, indices)` and never on the
//! order in which work is scheduled.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// The generator used for all sampling.
pub type StreamRng = Xoshiro256PlusPlus;

/// Domain tag separating bootstrap streams from trial streams.
pub const BOOTSTRAP_TAG: u64 = u64::from_be_bytes(*b"bootstrp");
/// Domain tag for verification sweeps.
pub const VERIFY_TAG: u64 = u64::from_be_bytes(*b"verifysw");
/// Domain tag for Monte-Carlo level-upgrade estimates.
pub const LEVEL_TAG: u64 = u64::from_be_bytes(*b"levelmc_");

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of the child stream at `path` below `master`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |h, &p| splitmix64(h ^ splitmix64(p)))
}

/// Creates the stream for a 64-bit seed.
pub fn stream(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

/// Uniform double in `[0, 1)` with 53 random bits.
#[inline]
pub(crate) fn unit_f64(rng: &mut impl rand::RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

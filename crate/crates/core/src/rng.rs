//! Seeded randomness.
//!
//! Every random quantity is drawn from a [`ChaCha8Rng`] seeded from a single
//! master seed. Independent streams (restarts, corpus members, samples) use
//! [`derive_seed`]: the stream index is mixed into the master seed with a
//! SplitMix64 finalizer, so `derive_seed(s, i)` is stable across platforms and
//! releases.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `stream` under master seed `master`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream.wrapping_add(1)))
}

/// Standard complex normal sample, E|z|^2 = 1.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_normal_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<C64> {
    DVector::from_fn(dim, |_, _| complex_normal(rng))
}

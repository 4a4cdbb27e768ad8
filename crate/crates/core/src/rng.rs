//! Reproducible random streams.
//!
//! Every random draw comes from a ChaCha8 stream keyed by a 64-bit seed
//! (expanded with `SeedableRng::seed_from_u64`) and a 64-bit stream id. Streams
//! are independent of thread scheduling: callers derive `(seed, stream)` from
//! task coordinates, never from shared state.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a sequence of words: `h ← mix64(h ⊕ w)` starting from a fixed constant.
pub fn derive_seed(words: &[u64]) -> u64 {
    words.iter().fold(0x243F_6A88_85A3_08D3, |h, &w| mix64(h ^ w))
}

/// The ChaCha8 stream `stream` under key `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform on `[0, 1)` from the top 53 bits of one 64-bit output.
pub fn uniform01(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `lo + (hi − lo)·u` with `u` uniform on `[0, 1)`.
pub fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform01(rng)
}

/// Unit-rate exponential by inversion.
pub fn exponential(rng: &mut impl RngCore) -> f64 {
    -(1.0 - uniform01(rng)).ln()
}

/// Uniform index in `0..n`.
pub fn index(rng: &mut impl RngCore, n: usize) -> usize {
    ((uniform01(rng) * n as f64) as usize).min(n - 1)
}

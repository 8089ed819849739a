//! Deterministic, counter-keyed random substreams.
//!
//! Every (seed, population index, replication) cell gets its own ChaCha8
//! stream whose key is derived with SplitMix64, so results are reproducible
//! bit-for-bit regardless of thread count or evaluation order, and a stream
//! can be regenerated from scratch for multi-pass streaming selection.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 step (Vigna's constants); mixes the state and returns one word.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Builds the ChaCha8 stream for one experiment cell.
pub(crate) fn substream(seed: u64, n_index: u64, replication: u64) -> ChaCha8Rng {
    let mut state = seed;
    let a = splitmix64(&mut state);
    state ^= n_index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let b = splitmix64(&mut state);
    state ^= replication.wrapping_mul(0x8CB9_2BA7_2F3D_8DD7);
    let c = splitmix64(&mut state);
    let d = splitmix64(&mut state);
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..32].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw on [0, 1) with 53 random bits; consumes exactly one word.
pub(crate) fn unit_uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

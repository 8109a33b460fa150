//! Seed derivation.
//!
//! All randomness comes from ChaCha8 streams keyed by `(master seed, task
//! label, indices)`. Two tasks with different labels or indices never share a
//! stream, and a task's stream does not depend on what ran before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mix(master: u64, label: &str, index: &[u64]) -> u64 {
    let mut state = master ^ fnv1a(label.as_bytes()).rotate_left(17);
    let mut acc = splitmix(&mut state);
    for &i in index {
        state ^= i.wrapping_mul(0xd6e8_feb8_6659_fd93);
        acc ^= splitmix(&mut state);
    }
    acc
}

/// A child seed, for handing to a component that derives its own streams.
pub fn derive_seed(master: u64, label: &str, index: &[u64]) -> u64 {
    mix(master, label, index)
}

/// An independent generator for one stochastic task.
pub fn stream(master: u64, label: &str, index: &[u64]) -> Stream {
    let mut state = mix(master, label, index);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

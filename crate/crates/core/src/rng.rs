//! Seeded, splittable random streams.
//!
//! A stream is identified by a 64-bit key. Child streams are derived from the
//! key alone (never from how much of the parent has been consumed), so
//! `RandomStream::new(seed).substream(i)` names the same sequence no matter
//! which thread asks for it or when. Draws come from ChaCha8 keyed by a
//! splitmix64 expansion of the stream key.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    key: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut bytes = [0u8; 32];
        for chunk in bytes.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        Self {
            key: seed,
            rng: ChaCha8Rng::from_seed(bytes),
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream number `index`.
    pub fn substream(&self, index: u64) -> Self {
        Self::new(splitmix64(self.key.rotate_left(23) ^ splitmix64(index ^ 0xD1B5_4A32_D192_ED03)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `{0, .., n-1}`; `n` must be non-zero.
    pub fn next_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_index on empty range");
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn next_bool(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}

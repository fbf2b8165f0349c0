//! Counter-based random streams.
//!
//! Every ant draws from a ChaCha8 stream selected by (instance, iteration,
//! ant, attempt) under a key derived from the master seed. Streams never
//! depend on which worker runs the ant, so results are independent of the
//! schedule. Construction consumes exactly two uniforms per order, so the
//! word position of order `k` is fixed as well.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifies one ant's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AntKey {
    pub master_seed: u64,
    pub instance: u32,
    pub iteration: u32,
    pub ant: u8,
    pub attempt: u8,
}

impl AntKey {
    pub fn new(master_seed: u64, instance: usize, iteration: usize, ant: usize) -> Self {
        debug_assert!(instance <= u16::MAX as usize && ant <= u8::MAX as usize);
        Self {
            master_seed,
            instance: instance as u32,
            iteration: iteration as u32,
            ant: ant as u8,
            attempt: 0,
        }
    }

    pub fn retry(self) -> Self {
        Self {
            attempt: self.attempt.wrapping_add(1),
            ..self
        }
    }

    /// Packs (instance:16, ant:8, attempt:8, iteration:32) into a stream id.
    pub fn stream_id(&self) -> u64 {
        ((self.instance as u64 & 0xffff) << 48)
            | ((self.ant as u64) << 40)
            | ((self.attempt as u64) << 32)
            | self.iteration as u64
    }

    pub fn stream(&self) -> UniformStream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id());
        UniformStream { rng }
    }
}

/// Source of uniforms on [0, 1).
pub trait Uniform01 {
    fn next_f64(&mut self) -> f64;
}

#[derive(Debug, Clone)]
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Uniform01 for UniformStream {
    #[inline]
    fn next_f64(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

impl<R: rand::RngCore> Uniform01 for &mut R {
    #[inline]
    fn next_f64(&mut self) -> f64 {
        self.random::<f64>()
    }
}

/// SplitMix64 finalizer; used to derive per-cell and per-instance seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines seed components into one 64-bit seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5EED_u64, |acc, &p| mix64(acc ^ mix64(p)))
}

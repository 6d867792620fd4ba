//! Reproducible random streams keyed by `(global seed, env index, episode index)`.
//!
//! Each stream is a ChaCha keystream whose 256-bit key is built by mixing the
//! triple (and a purpose tag) through SplitMix64. Distinct triples give
//! distinct keys, so streams never share state and a run can be replayed from
//! its global seed alone regardless of worker scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// What a stream is used for. Each purpose keys an independent family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamPurpose {
    Environment,
    Policy,
    Minibatch,
    Init,
}

impl StreamPurpose {
    fn tag(self) -> u64 {
        match self {
            StreamPurpose::Environment => 0x454e_5649_524f_4e00,
            StreamPurpose::Policy => 0x504f_4c49_4359_0000,
            StreamPurpose::Minibatch => 0x4d49_4e49_4241_5443,
            StreamPurpose::Init => 0x494e_4954_0000_0000,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    global_seed: u64,
    env_index: u64,
    episode_index: u64,
    draws: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn derive(
        global_seed: u64,
        env_index: u64,
        episode_index: u64,
        purpose: StreamPurpose,
    ) -> Self {
        // Absorb each word through a bijective mix, then squeeze the key.
        let mut state = global_seed;
        for word in [purpose.tag(), env_index, episode_index] {
            let mut absorbed = state ^ word;
            state = splitmix64(&mut absorbed);
        }
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self {
            global_seed,
            env_index,
            episode_index,
            draws: 0,
            rng: ChaCha12Rng::from_seed(key),
        }
    }

    pub fn seed_triple(&self) -> (u64, u64, u64) {
        (self.global_seed, self.env_index, self.episode_index)
    }

    /// Number of primitive draws taken so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        self.rng.random::<f64>()
    }

    /// Uniform integer on `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        self.draws += 1;
        self.rng.random_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.draws += 1;
        self.rng.sample(StandardNormal)
    }

    pub fn normal(&mut self, sigma: f64) -> f64 {
        sigma * self.standard_normal()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.rng.next_u64()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

/// Environment stream for episode `episode_index` of worker `env_index`.
pub fn derive_stream(global_seed: u64, env_index: u64, episode_index: u64) -> RngStream {
    RngStream::derive(global_seed, env_index, episode_index, StreamPurpose::Environment)
}

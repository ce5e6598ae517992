//! Seeded, splittable random streams.
//!
//! A stream is keyed by `(master_seed, stream_index)`; the ChaCha key is
//! derived from the master seed and the stream index selects the ChaCha
//! stream, so realization `n` draws the same numbers no matter which thread
//! or in which order it runs. [`RngStream::lane`] derives further independent
//! sub-streams (channel, observation noise, swarm, ...) for the same index.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha12Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = master_seed;
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(key);
        rng.set_stream(stream_index);
        Self { master_seed, stream_index, rng }
    }

    /// An independent sub-stream for the same realization, keyed by `lane`.
    pub fn lane(&self, lane: u64) -> Self {
        let seed = splitmix64(self.master_seed ^ splitmix64(lane.wrapping_add(0xA5A5_5A5A)));
        Self::new(seed, self.stream_index)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `[lo, hi)`; returns `lo` when the interval is empty.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// `n` i.i.d. draws from CN(0, 1): real and imaginary parts each N(0, 1/2).
pub fn sample_standard_complex_gaussian(rng: &mut RngStream, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    Ok((0..n)
        .map(|_| {
            let re = rng.standard_normal();
            let im = rng.standard_normal();
            Complex64::new(re * scale, im * scale)
        })
        .collect())
}

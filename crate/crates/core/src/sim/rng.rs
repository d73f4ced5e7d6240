//! Deterministic random streams keyed by `(master_seed, stream_index)`.
//!
//! Every replicate, chain or bootstrap loop draws from its own stream so
//! that results do not depend on how work is scheduled across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::stats::normal_inverse_cdf;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        RngStream { inner }
    }

    /// Child stream for nested loops (e.g. bootstrap draws inside a
    /// replicate). Seeded from this stream's output, so it is still a pure
    /// function of the parent's key.
    pub fn fork(&mut self, index: u64) -> RngStream {
        RngStream::new(self.inner.next_u64(), index)
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate by inverse-CDF transform.
    pub fn normal(&mut self) -> f64 {
        normal_inverse_cdf(self.uniform())
    }

    /// Uniform integer in `0..n` (n > 0), via Lemire's multiply-shift with
    /// rejection.
    pub fn below(&mut self, n: usize) -> usize {
        let n = n as u64;
        loop {
            let x = self.inner.next_u64();
            let m = (x as u128) * (n as u128);
            let lo = m as u64;
            if lo >= n || lo >= n.wrapping_neg() % n {
                return (m >> 64) as usize;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i + 1);
            xs.swap(i, j);
        }
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Stream for `(master_seed, stream_index)`.
pub fn rng_stream(master_seed: u64, stream_index: u64) -> RngStream {
    RngStream::new(master_seed, stream_index)
}

//! Counter-indexed random substreams.
//!
//! Replication `r` of a run keyed by `key` (the sample size, for the
//! calibration engine) draws from ChaCha8 with a 256-bit key derived from
//! `(master_seed, key)` and stream id `r`. Any replication can be reproduced
//! on its own, so results do not depend on how work is split.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::normal::inverse_cdf;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_key(master_seed: u64, key: u64) -> [u8; 32] {
    let mut state = mix(master_seed ^ 0x9e37_79b9_7f4a_7c15).wrapping_add(mix(key));
    let mut out = [0u8; 32];
    for chunk in out.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        chunk.copy_from_slice(&mix(state).to_le_bytes());
    }
    out
}

/// One replication's random stream.
#[derive(Debug, Clone)]
pub struct Substream {
    rng: ChaCha8Rng,
}

impl Substream {
    pub fn new(master_seed: u64, key: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(derive_key(master_seed, key));
        rng.set_stream(index);
        Self { rng }
    }

    /// Uniform on the open interval (0, 1), with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by inversion.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        inverse_cdf(self.uniform())
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.normal();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let draw = |s: u64, k: u64, r: u64| Substream::new(s, k, r).rng.next_u64();
        assert_eq!(draw(1, 5, 7), draw(1, 5, 7));
        assert_ne!(draw(1, 5, 7), draw(1, 5, 8));
        assert_ne!(draw(1, 5, 7), draw(1, 6, 7));
        assert_ne!(draw(1, 5, 7), draw(2, 5, 7));
        // swapping seed and key must not collide
        assert_ne!(draw(5, 1, 0), draw(1, 5, 0));
    }

    #[test]
    fn uniforms_stay_inside_the_open_interval() {
        let mut s = Substream::new(0, 0, 0);
        for _ in 0..100_000 {
            let u = s.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn normal_moments() {
        const N: usize = 1_000_000;
        let mut s = Substream::new(2024, 1, 0);
        let mut xs = vec![0.0; N];
        s.fill_normal(&mut xs);
        let mean = xs.iter().sum::<f64>() / N as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (N - 1) as f64;
        // SE of the mean is 1/√N, of the variance √(2/N)
        assert!(mean.abs() < 4.0 / (N as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 4.0 * (2.0 / N as f64).sqrt(), "var {var}");
    }

    #[test]
    fn kolmogorov_smirnov() {
        const N: usize = 1_000_000;
        let mut s = Substream::new(99, 3, 11);
        let mut xs = vec![0.0; N];
        s.fill_normal(&mut xs);
        xs.sort_by(f64::total_cmp);
        let normal = Normal::standard();
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = normal.cdf(x);
                (f - i as f64 / N as f64).max((i + 1) as f64 / N as f64 - f)
            })
            .fold(0.0, f64::max);
        // asymptotic 1% critical value
        assert!(d < 1.628 / (N as f64).sqrt(), "D = {d}");
    }
}

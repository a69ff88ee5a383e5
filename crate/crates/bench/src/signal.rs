//! Reproducible AR(1) test signals.
//!
//! Uniforms come from ChaCha8 seeded with `seed_from_u64`, as `u64 >> 11`
//! scaled by 2⁻⁵³. Normals use the Box–Muller cosine branch,
//! `sqrt(−2 ln(1 − u₁)) · cos(2π u₂)`, one normal per pair of uniforms.

use crate::error::{BenchError, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Correlation used throughout the experiments.
pub const DEFAULT_CORRELATION: f64 = 0.99;

fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    let u1 = uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Stationary AR(1): `s₁ ~ N(0, 1/(1−r²))`, `s_{j+1} = r s_j + N(0, 1)`.
pub fn gen_ar_signal(n: usize, r: f64, rng: &mut impl RngCore) -> Result<Vec<f64>> {
    if !(r.abs() < 1.0) {
        return Err(BenchError::Config(format!("AR correlation must satisfy |r| < 1, got {r}")));
    }
    let mut s = Vec::with_capacity(n);
    if n == 0 {
        return Ok(s);
    }
    s.push(standard_normal(rng) / (1.0 - r * r).sqrt());
    for j in 1..n {
        let next = r * s[j - 1] + standard_normal(rng);
        s.push(next);
    }
    Ok(s)
}

/// Deterministic stream of AR signals.
#[derive(Debug, Clone)]
pub struct ArSignalSource {
    r: f64,
    seed: u64,
    rng: ChaCha8Rng,
}

impl ArSignalSource {
    pub fn new(r: f64, seed: u64) -> Result<Self> {
        if !(r.abs() < 1.0) {
            return Err(BenchError::Config(format!("AR correlation must satisfy |r| < 1, got {r}")));
        }
        Ok(Self {
            r,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn correlation(&self) -> f64 {
        self.r
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_signal(&mut self, n: usize) -> Vec<f64> {
        gen_ar_signal(n, self.r, &mut self.rng).expect("correlation validated at construction")
    }

    pub fn batch(&mut self, n: usize, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.next_signal(n)).collect()
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

//! Closed-form objectives shared by the optimizer tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A separable concave quadratic `peak - sum a_i (x_i - c_i)^2`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub peak: f64,
    pub a: Vec<f64>,
    pub c: Vec<f64>,
}

impl Quadratic {
    pub fn random(seed: u64, dim: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            peak: 0.9,
            a: (0..dim).map(|_| rng.random_range(0.5..2.0)).collect(),
            c: (0..dim).map(|_| rng.random_range(-0.5..1.5)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        let penalty: f64 = w
            .iter()
            .zip(self.a.iter().zip(&self.c))
            .map(|(x, (a, c))| a * (x - c) * (x - c))
            .sum();
        self.peak - penalty
    }
}

/// Deterministic pseudo-random score in [0, 0.95) keyed on the grid weights.
pub fn hashed_score(w: &[f64]) -> f64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for x in w {
        h ^= x.to_bits();
        h = h.wrapping_mul(0x100000001b3);
    }
    (h >> 11) as f64 / (1u64 << 53) as f64 * 0.95
}

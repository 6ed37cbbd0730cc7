//! Seeded sampling helpers shared by certification and nets.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64, stream: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(stream)))
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Standard normal via Box-Muller.
pub fn gaussian(rng: &mut SeededRng) -> f64 {
    loop {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        if u > 1e-300 {
            return libm::sqrt(-2.0 * libm::log(u)) * libm::cos(core::f64::consts::TAU * v);
        }
    }
}

/// Uniformly distributed unit vector.
pub fn unit_vector(rng: &mut SeededRng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = crate::math::norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random convex-combination weights (flat Dirichlet).
pub fn simplex_weights(rng: &mut SeededRng, count: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..count)
        .map(|_| -libm::log(rng.random::<f64>().max(1e-300)))
        .collect();
    let s: f64 = w.iter().sum();
    for x in &mut w {
        *x /= s;
    }
    w
}

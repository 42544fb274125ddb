#![allow(dead_code)]

use qdeg::linalg::{c, CMat};
use qdeg::random::{random_channel, random_density, rng};
use qdeg::{DensityOperator, QuantumChannel};

/// Seeded channel with random dimensions in `1..=3` and up to three Kraus operators.
pub fn channel_from_seed(seed: u64) -> QuantumChannel {
    let mut r = rng(seed);
    let a = 1 + (seed % 3) as usize;
    let b = 1 + ((seed / 3) % 3) as usize;
    let k = 1 + ((seed / 9) % 3) as usize;
    let k = k.max(a.div_ceil(b));
    random_channel(&mut r, a, b, k)
}

pub fn qubit_channel(seed: u64, kraus: usize) -> QuantumChannel {
    random_channel(&mut rng(seed), 2, 2, kraus)
}

pub fn state(seed: u64, dim: usize) -> DensityOperator {
    let mut r = rng(seed);
    let rank = 1 + (seed as usize % dim);
    random_density(&mut r, dim, rank)
}

/// Random state and a nearby one, `(1 - t) rho + t sigma`, so that small
/// distances are well represented.
pub fn nearby_pair(seed: u64, dim: usize, t: f64) -> (DensityOperator, DensityOperator) {
    let rho = state(seed, dim);
    let sigma = state(seed.wrapping_add(0x9e37_79b9), dim);
    let mixed = rho.matrix() * c(1.0 - t, 0.0) + sigma.matrix() * c(t, 0.0);
    (rho, DensityOperator::new(mixed).unwrap())
}

pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    qdeg::linalg::max_abs_diff(a, b)
}

#![allow(dead_code)]

use privwit::qcore::SubsystemDims;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dims(spec: &[(&str, usize)]) -> SubsystemDims {
    SubsystemDims::new(spec.iter().map(|&(l, d)| (l, d))).unwrap()
}

pub fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// `-x log x - (1-x) log(1-x)` written out, independent of the library.
pub fn h(x: f64) -> f64 {
    let t = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    t(x) + t(1.0 - x)
}

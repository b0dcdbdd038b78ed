#![allow(dead_code)]

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skipfree::IncrementDistribution;

/// Random finite laws with `p_{-1} ∈ [0.05, 0.6]`, at most 8 support points
/// and positive drift. Deterministic in `seed`.
pub fn random_suite(count: usize, seed: u64) -> Vec<IncrementDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = rng.random_range(0.05..=0.6);
        let extra = rng.random_range(1..=7usize);
        let points = sample(&mut rng, 13, extra);
        let weights: Vec<f64> = (0..extra).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut pmf = vec![(-1i64, p)];
        pmf.extend(points.iter().zip(&weights).map(|(k, w)| (k as i64, (1.0 - p) * w / total)));
        let dist = IncrementDistribution::finite(&pmf).expect("valid pmf");
        if dist.drift() > 1e-3 {
            out.push(dist);
        }
    }
    out
}

pub fn simple_walk(p: f64) -> IncrementDistribution {
    IncrementDistribution::finite(&[(-1, 1.0 - p), (1, p)]).unwrap()
}

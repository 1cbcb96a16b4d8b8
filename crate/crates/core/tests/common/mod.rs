#![allow(dead_code)]

use std::path::PathBuf;

use qga_tsp::DistanceMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BURMA14_OPT: f64 = 30.878503892587997;
pub const ULYSSES16_OPT: f64 = 73.987618045175;
pub const BAYG29_REF: f64 = 9074.15;
pub const ATT48_REF: f64 = 33522.0;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn random_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
        .collect()
}

/// Exhaustive search over every tour starting at city 0.
pub fn brute_force(d: &DistanceMatrix<f64>) -> f64 {
    fn go(d: &DistanceMatrix<f64>, path: &mut Vec<usize>, used: &mut [bool], acc: f64, best: &mut f64) {
        let n = d.n();
        let last = *path.last().unwrap();
        if path.len() == n {
            *best = best.min(acc + d.get(last, 0));
            return;
        }
        for c in 1..n {
            if !used[c] {
                used[c] = true;
                path.push(c);
                go(d, path, used, acc + d.get(last, c), best);
                path.pop();
                used[c] = false;
            }
        }
    }
    let mut used = vec![false; d.n()];
    used[0] = true;
    let mut best = f64::INFINITY;
    go(d, &mut vec![0], &mut used, 0.0, &mut best);
    best
}

pub fn within(value: f64, reference: f64, frac: f64) -> bool {
    value <= reference * (1.0 + frac) + 1e-9
}

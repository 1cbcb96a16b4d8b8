//! Held-Karp dynamic program: provably optimal tours for small instances.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tour::Tour;
use crate::tsplib::DistanceMatrix;

/// Default ceiling on the city count; the table needs `2^(n-1) * (n-1)` entries.
pub const DEFAULT_LIMIT: usize = 18;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult<S> {
    pub optimal_length: S,
    /// Starts at city 0.
    pub optimal_tour: Tour,
}

/// Solves the instance exactly. The tour is anchored at city 0; ties between
/// equal-length completions go to the lowest city index.
pub fn held_karp<S: Scalar>(dmat: &DistanceMatrix<S>, limit: usize) -> Result<ExactResult<S>> {
    let n = dmat.n();
    if n < 3 {
        return Err(Error::TooFewCities { n });
    }
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    // Cities 1..n map to bits 0..m.
    let m = n - 1;
    let full = (1usize << m) - 1;
    let idx = |mask: usize, j: usize| mask * m + j;
    let mut cost = vec![S::infinity(); (full + 1) * m];
    let mut parent = vec![u8::MAX; (full + 1) * m];

    for j in 0..m {
        cost[idx(1 << j, j)] = dmat.get(0, j + 1);
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let prev = mask ^ (1 << j);
            let mut best = S::infinity();
            let mut arg = u8::MAX;
            let mut rest = prev;
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let c = cost[idx(prev, k)] + dmat.get(k + 1, j + 1);
                if c < best {
                    best = c;
                    arg = k as u8;
                }
            }
            cost[idx(mask, j)] = best;
            parent[idx(mask, j)] = arg;
        }
    }

    let mut best = S::infinity();
    let mut last = 0;
    for j in 0..m {
        let c = cost[idx(full, j)] + dmat.get(j + 1, 0);
        if c < best {
            best = c;
            last = j;
        }
    }

    let mut rev = Vec::with_capacity(n);
    let mut mask = full;
    let mut j = last;
    loop {
        rev.push(j + 1);
        let p = parent[idx(mask, j)];
        mask ^= 1 << j;
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    rev.push(0);
    rev.reverse();

    let optimal_tour = Tour::from_vec_unchecked(rev);
    // Report the length of the reconstructed cycle so the two always agree exactly.
    let optimal_length = dmat.cycle_length(optimal_tour.as_slice());
    debug_assert!((optimal_length - best).abs() <= S::of(1e-6) * (S::one() + best));
    Ok(ExactResult {
        optimal_length,
        optimal_tour,
    })
}

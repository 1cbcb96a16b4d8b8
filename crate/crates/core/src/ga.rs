//! Classical genetic algorithm on permutation-encoded tours.
//!
//! Each generation ranks the population, mates the better half with order
//! crossover and swap mutation, and keeps the best `population_size`
//! individuals of parents and offspring together.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tour::Tour;
use crate::tsplib::{distance_matrix, DistanceMatrix, DistanceMetric, TspInstance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaParams {
    pub population_size: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub generation_max: usize,
    /// Individuals of the old population that survive unconditionally.
    pub elite_count: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 80,
            crossover_prob: 0.7,
            mutation_prob: 0.3,
            generation_max: 500,
            elite_count: 1,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidParams("population_size must be at least 2".into()));
        }
        if self.generation_max == 0 {
            return Err(Error::InvalidParams("generation_max must be positive".into()));
        }
        if self.elite_count == 0 || self.elite_count >= self.population_size {
            return Err(Error::InvalidParams(format!(
                "elite_count {} must be in 1..{}",
                self.elite_count, self.population_size
            )));
        }
        check_prob("crossover_prob", self.crossover_prob)?;
        check_prob("mutation_prob", self.mutation_prob)
    }
}

pub(crate) fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} = {p} outside [0, 1]")))
    }
}

/// Outcome of a single seeded solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<S> {
    pub best_length: S,
    pub best_tour: Tour,
    /// First generation whose best-so-far equals `best_length`.
    pub iterations_to_best: usize,
    /// Best-so-far length after each generation; one entry per generation.
    pub fitness_curve: Vec<S>,
    pub wall_time_seconds: f64,
    pub seed: u64,
}

impl<S: Scalar> RunRecord<S> {
    pub(crate) fn new(best_tour: Tour, fitness_curve: Vec<S>, wall_time_seconds: f64, seed: u64) -> Self {
        let best_length = *fitness_curve.last().expect("at least one generation");
        let iterations_to_best = fitness_curve
            .iter()
            .position(|&v| v == best_length)
            .expect("final value occurs in curve");
        RunRecord {
            best_length,
            best_tour,
            iterations_to_best,
            fitness_curve,
            wall_time_seconds,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual<S> {
    pub tour: Tour,
    pub length: S,
}

impl<S: Scalar> Individual<S> {
    pub fn new(tour: Tour, dmat: &DistanceMatrix<S>) -> Self {
        let length = dmat.cycle_length(tour.as_slice());
        Individual { tour, length }
    }
}

pub(crate) fn by_length<S: Scalar>(a: S, b: S) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// `count` independent uniformly random permutations of `0..n`.
pub fn init_random_population<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Result<Vec<Tour>> {
    if n < 3 {
        return Err(Error::TooFewCities { n });
    }
    Ok((0..count)
        .map(|_| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            Tour::from_vec_unchecked(order)
        })
        .collect())
}

fn ox_child(keep: &[usize], donor: &[usize], a: usize, b: usize) -> Vec<usize> {
    let n = keep.len();
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in a..b {
        child[i] = keep[i];
        used[keep[i]] = true;
    }
    let mut pos = b % n;
    for k in 0..n {
        let city = donor[(b + k) % n];
        if used[city] {
            continue;
        }
        while child[pos] != usize::MAX {
            pos = (pos + 1) % n;
        }
        child[pos] = city;
        used[city] = true;
    }
    child
}

/// Order crossover with the segment `[a, b)`.
///
/// `child1` keeps `p1[a..b)` in place and fills the other positions,
/// starting at `b` and wrapping, with the cities of `p2` read circularly
/// from index `b`, skipping those already present. `child2` is symmetric.
pub fn order_crossover(p1: &Tour, p2: &Tour, a: usize, b: usize) -> Result<(Tour, Tour)> {
    let n = p1.len();
    if p2.len() != n {
        return Err(Error::InvalidTour(format!("parents of lengths {n} and {}", p2.len())));
    }
    if a >= b || b > n {
        return Err(Error::InvalidCut { a, b, n });
    }
    let (x, y) = (p1.as_slice(), p2.as_slice());
    Ok((
        Tour::from_vec_unchecked(ox_child(x, y, a, b)),
        Tour::from_vec_unchecked(ox_child(y, x, a, b)),
    ))
}

/// A uniformly random cut `0 <= a < b <= n`.
pub fn random_cut<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(a + 1..=n);
    (a, b)
}

/// Exchanges the cities at positions `i` and `j`.
pub fn swap_at(t: &Tour, i: usize, j: usize) -> Tour {
    let mut out = t.clone();
    out.swap(i, j);
    out
}

/// Exchanges two distinct, uniformly chosen positions.
pub fn swap_mutation<R: Rng + ?Sized>(t: &Tour, rng: &mut R) -> Tour {
    let n = t.len();
    if n < 2 {
        return t.clone();
    }
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    swap_at(t, i, j)
}

/// One generation. The population comes back sorted by length; the return
/// value is its best length.
///
/// Offspring that duplicate a tour already in the population (in either
/// direction, from any starting city) or an earlier offspring are dropped
/// before the survivor competition.
pub fn ga_step<S: Scalar, R: Rng + ?Sized>(
    population: &mut Vec<Individual<S>>,
    dmat: &DistanceMatrix<S>,
    params: &GaParams,
    rng: &mut R,
) -> S {
    let n = dmat.n();
    let size = population.len();
    population.sort_by(|a, b| by_length(a.length, b.length));

    let pool = (size / 2).max(2).min(size);

    let mut known: HashSet<Tour> = population.iter().map(|ind| ind.tour.canonical()).collect();
    let mut offspring = Vec::with_capacity(size);
    for _ in 0..size / 2 {
        let i = rng.gen_range(0..pool);
        let mut j = rng.gen_range(0..pool - 1);
        if j >= i {
            j += 1;
        }
        let (p1, p2) = (&population[i].tour, &population[j].tour);
        let (mut c1, mut c2) = if rng.gen::<f64>() < params.crossover_prob {
            let (a, b) = random_cut(n, rng);
            order_crossover(p1, p2, a, b).expect("valid cut")
        } else {
            (p1.clone(), p2.clone())
        };
        for child in [&mut c1, &mut c2] {
            if rng.gen::<f64>() < params.mutation_prob {
                *child = swap_mutation(child, rng);
            }
        }
        for child in [c1, c2] {
            if known.insert(child.canonical()) {
                offspring.push(Individual::new(child, dmat));
            }
        }
    }

    let elite = params.elite_count.min(size);
    let mut rest: Vec<Individual<S>> = population.drain(elite..).collect();
    rest.extend(offspring);
    rest.sort_by(|a, b| by_length(a.length, b.length));
    rest.truncate(size - elite);
    population.extend(rest);
    population.sort_by(|a, b| by_length(a.length, b.length));

    debug_assert!(population
        .iter()
        .all(|ind| crate::tour::is_permutation(ind.tour.as_slice())));
    population[0].length
}

/// Runs the GA on a prepared distance matrix.
pub fn run_ga_on<S: Scalar>(dmat: &DistanceMatrix<S>, params: &GaParams) -> Result<RunRecord<S>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let start = Instant::now();

    let mut population: Vec<Individual<S>> = init_random_population(dmat.n(), params.population_size, &mut rng)?
        .into_iter()
        .map(|t| Individual::new(t, dmat))
        .collect();
    let mut best = population
        .iter()
        .min_by(|a, b| by_length(a.length, b.length))
        .expect("nonempty population")
        .clone();

    let mut curve = Vec::with_capacity(params.generation_max);
    for _ in 0..params.generation_max {
        ga_step(&mut population, dmat, params, &mut rng);
        if population[0].length < best.length {
            best = population[0].clone();
        }
        curve.push(best.length);
    }

    Ok(RunRecord::new(
        best.tour,
        curve,
        start.elapsed().as_secs_f64(),
        params.seed,
    ))
}

/// Runs the GA on `inst` under `metric`.
pub fn run_ga<S: Scalar>(inst: &TspInstance, metric: DistanceMetric, params: &GaParams) -> Result<RunRecord<S>> {
    let dmat = distance_matrix::<S>(inst, metric)?;
    run_ga_on(&dmat, params)
}

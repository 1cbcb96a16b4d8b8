//! Quantum-inspired genetic algorithm.
//!
//! A chromosome holds one group of `b` qubits per tour position. Each
//! generation the qubits are measured into bits, every `b`-bit gene is read
//! as a city number and the resulting sequence is repaired into a valid
//! tour. Elite selection, order crossover on the decoded tours and
//! amplitude-swap mutation follow, and finally a rotation gate turns every
//! qubit toward the bit pattern of the best tour seen so far.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ga::{by_length, check_prob, order_crossover, random_cut, RunRecord};
use crate::scalar::Scalar;
use crate::tour::Tour;
use crate::tsplib::{distance_matrix, DistanceMatrix, DistanceMetric, TspInstance};

/// A qubit `alpha|0> + beta|1>` with real amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit<S> {
    pub alpha: S,
    pub beta: S,
}

impl<S: Scalar> Qubit<S> {
    pub fn new(alpha: S, beta: S) -> Self {
        Qubit { alpha, beta }
    }

    /// `H|0>`: the equal superposition `(1/sqrt 2, 1/sqrt 2)`.
    pub fn hadamard_zero() -> Self {
        let h = S::FRAC_1_SQRT_2();
        // H = [[h, h], [h, -h]] applied to (1, 0)
        Qubit::new(h * S::one() + h * S::zero(), h * S::one() - h * S::zero())
    }

    /// `U(theta) H |0>`, i.e. `(cos(theta + pi/4), sin(theta + pi/4))`.
    pub fn initial(theta: S) -> Self {
        Self::hadamard_zero().rotated(theta)
    }

    /// Applies the rotation gate `[[cos t, -sin t], [sin t, cos t]]`.
    pub fn rotated(self, theta: S) -> Self {
        let (s, c) = theta.sin_cos();
        Qubit::new(self.alpha * c - self.beta * s, self.alpha * s + self.beta * c)
    }

    /// Exchanges the two amplitudes.
    pub fn flipped(self) -> Self {
        Qubit::new(self.beta, self.alpha)
    }

    pub fn norm_sqr(self) -> S {
        self.alpha * self.alpha + self.beta * self.beta
    }

    /// Probability of collapsing to `|1>`.
    pub fn prob_one(self) -> S {
        self.beta * self.beta
    }
}

/// How many qubits encode one city.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum BitsRule {
    /// `ceil(log2 N)`: every city index is representable.
    #[default]
    CeilLog2,
    /// `max(1, floor(log2 N))`: high city indices are only reachable through repair.
    FloorLog2,
}

/// How a qubit collapses to a classical bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Measurement {
    /// Bit is 1 with probability `beta^2`.
    #[default]
    Stochastic,
    /// Bit is 1 exactly when `beta^2 > alpha^2`.
    Compare,
}

pub fn bits_per_gene(n: usize, rule: BitsRule) -> u32 {
    assert!(n >= 2, "need at least two cities");
    match rule {
        BitsRule::CeilLog2 => (n - 1).ilog2() + 1,
        BitsRule::FloorLog2 => n.ilog2().max(1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChromosome<S> {
    /// `n * bits` qubits; gene `i` is `qubits[i * bits..(i + 1) * bits]`, most significant first.
    pub qubits: Vec<Qubit<S>>,
    pub bits: u32,
    /// Result of the latest measurement, same layout as `qubits`.
    pub last_bits: Vec<bool>,
    /// Decoded and repaired tour of `last_bits`, or the crossover child that replaced it.
    pub tour: Tour,
}

impl<S: Scalar> QuantumChromosome<S> {
    pub fn cities(&self) -> usize {
        self.tour.len()
    }

    pub fn gene(&self, i: usize) -> &[Qubit<S>] {
        let b = self.bits as usize;
        &self.qubits[i * b..(i + 1) * b]
    }

    /// Collapses every qubit and re-derives the tour.
    pub fn observe<R: Rng + ?Sized>(&mut self, rule: Measurement, rng: &mut R) {
        measure(self, rule, rng);
        self.tour = decode_and_repair(&self.last_bits, self.cities(), self.bits);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QgaParams {
    pub population_size: usize,
    pub crossover_prob: f64,
    /// Chance that a chromosome is considered for mutation.
    pub chromosome_mutation_prob: f64,
    /// Chance that each qubit of a selected chromosome is flipped; `None` means `2 / (N * b)`.
    pub qubit_mutation_prob: Option<f64>,
    pub generation_max: usize,
    pub elite_count: usize,
    pub theta_scale: f64,
    /// Upper bound on the rotation step; `None` leaves the schedule unclamped.
    pub theta_cap: Option<f64>,
    pub bits_rule: BitsRule,
    pub measurement: Measurement,
    pub seed: u64,
}

pub const DEFAULT_THETA_SCALE: f64 = 0.01;
pub const DEFAULT_THETA_CAP: f64 = 0.05 * std::f64::consts::PI;

impl Default for QgaParams {
    fn default() -> Self {
        Self::with_population(80)
    }
}

impl QgaParams {
    /// Defaults for a given population size; elites are a fifth of it, rounded up.
    pub fn with_population(population_size: usize) -> Self {
        QgaParams {
            population_size,
            crossover_prob: 0.7,
            chromosome_mutation_prob: 0.3,
            qubit_mutation_prob: None,
            generation_max: 500,
            elite_count: population_size.div_ceil(5),
            theta_scale: DEFAULT_THETA_SCALE,
            theta_cap: Some(DEFAULT_THETA_CAP),
            bits_rule: BitsRule::CeilLog2,
            measurement: Measurement::Stochastic,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidParams("population_size must be at least 2".into()));
        }
        if self.generation_max == 0 {
            return Err(Error::InvalidParams("generation_max must be positive".into()));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::InvalidParams(format!(
                "elite_count {} must be below population_size {}",
                self.elite_count, self.population_size
            )));
        }
        check_prob("crossover_prob", self.crossover_prob)?;
        check_prob("chromosome_mutation_prob", self.chromosome_mutation_prob)?;
        if let Some(p) = self.qubit_mutation_prob {
            check_prob("qubit_mutation_prob", p)?;
        }
        if self.theta_scale.is_nan() || self.theta_scale <= 0.0 {
            return Err(Error::InvalidParams("theta_scale must be positive".into()));
        }
        if self.theta_cap.is_some_and(|cap| cap.is_nan() || cap <= 0.0) {
            return Err(Error::InvalidParams("theta_cap must be positive".into()));
        }
        Ok(())
    }

    pub fn qubit_mutation_prob_for(&self, n: usize) -> f64 {
        self.qubit_mutation_prob
            .unwrap_or_else(|| (2.0 / (n as f64 * bits_per_gene(n, self.bits_rule) as f64)).min(1.0))
    }
}

/// Fresh population: each qubit is `U(theta) H |0>` with `theta` uniform on
/// `[0, pi/2]`, then measured and decoded once.
pub fn init_quantum_population<S: Scalar, R: Rng + ?Sized>(
    n: usize,
    params: &QgaParams,
    rng: &mut R,
) -> Result<Vec<QuantumChromosome<S>>> {
    if n < 3 {
        return Err(Error::TooFewCities { n });
    }
    let bits = bits_per_gene(n, params.bits_rule);
    let len = n * bits as usize;
    let half_pi = std::f64::consts::FRAC_PI_2;
    Ok((0..params.population_size)
        .map(|_| {
            let qubits = (0..len)
                .map(|_| Qubit::initial(S::of(rng.gen_range(0.0..=half_pi))))
                .collect();
            let mut chrom = QuantumChromosome {
                qubits,
                bits,
                last_bits: vec![false; len],
                tour: Tour::identity(n),
            };
            chrom.observe(params.measurement, rng);
            chrom
        })
        .collect())
}

/// Collapses every qubit of `chrom` into `chrom.last_bits` and returns them.
pub fn measure<'a, S: Scalar, R: Rng + ?Sized>(
    chrom: &'a mut QuantumChromosome<S>,
    rule: Measurement,
    rng: &mut R,
) -> &'a [bool] {
    for (bit, q) in chrom.last_bits.iter_mut().zip(&chrom.qubits) {
        *bit = match rule {
            Measurement::Stochastic => rng.gen::<f64>() < q.prob_one().as_f64(),
            Measurement::Compare => q.prob_one() > q.alpha * q.alpha,
        };
    }
    &chrom.last_bits
}

/// Reads each `bits`-wide gene as an unsigned number (MSB first) modulo `n`.
pub fn decode_genes(bits: &[bool], n: usize, bits_per_gene: u32) -> Vec<usize> {
    bits.chunks(bits_per_gene as usize)
        .take(n)
        .map(|g| g.iter().fold(0usize, |v, &b| (v << 1) | b as usize) % n)
        .collect()
}

/// Turns provisional city numbers into a permutation: the first occurrence
/// of each city stays, later duplicates take the missing cities in
/// ascending order.
pub fn repair(mut provisional: Vec<usize>) -> Tour {
    let n = provisional.len();
    let mut present = vec![false; n];
    for &c in &provisional {
        present[c] = true;
    }
    let mut missing = (0..n).filter(|&c| !present[c]);
    let mut seen = vec![false; n];
    for c in provisional.iter_mut() {
        if std::mem::replace(&mut seen[*c], true) {
            *c = missing.next().expect("one missing city per duplicate");
        }
    }
    Tour::from_vec_unchecked(provisional)
}

pub fn decode_and_repair(bits: &[bool], n: usize, bits_per_gene: u32) -> Tour {
    repair(decode_genes(bits, n, bits_per_gene))
}

/// Writes each city as a `bits`-wide binary number, MSB first.
pub fn encode_tour(tour: &Tour, bits: u32) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(tour.len() * bits as usize);
    for &city in tour.as_slice() {
        if bits < usize::BITS && city >> bits != 0 {
            return Err(Error::CityOutOfRange { city, bits });
        }
        out.extend((0..bits).rev().map(|k| (city >> k) & 1 == 1));
    }
    Ok(out)
}

/// Like [`encode_tour`], but a city with no exact `bits`-wide code (only
/// possible under `FloorLog2`) is written as its low `bits` bits.
fn encode_wrapped(tour: &Tour, bits: u32) -> Vec<bool> {
    let mask = (1usize << bits) - 1;
    tour.as_slice()
        .iter()
        .flat_map(|&c| (0..bits).rev().map(move |k| ((c & mask) >> k) & 1 == 1))
        .collect()
}

/// Sorts by tour length and overwrites the `count` worst chromosomes with
/// copies of the `count` best. Returns the lengths in the new order.
pub fn elite_replace<S: Scalar>(
    population: &mut [QuantumChromosome<S>],
    dmat: &DistanceMatrix<S>,
    count: usize,
) -> Vec<S> {
    let size = population.len();
    let mut keyed: Vec<(S, QuantumChromosome<S>)> = population
        .iter()
        .map(|c| (dmat.cycle_length(c.tour.as_slice()), c.clone()))
        .collect();
    keyed.sort_by(|a, b| by_length(a.0, b.0));
    let count = count.min(size);
    let elites: Vec<(S, QuantumChromosome<S>)> = keyed[..count].to_vec();
    for (i, e) in elites.into_iter().enumerate() {
        keyed[size - 1 - i] = e;
    }
    let mut lengths = Vec::with_capacity(size);
    for (slot, (len, chrom)) in population.iter_mut().zip(keyed) {
        *slot = chrom;
        lengths.push(len);
    }
    lengths
}

/// Crosses adjacent pairs `(0, 1), (2, 3), ...` with probability `pc` using
/// order crossover on their tours. Amplitudes are left alone. Returns the
/// indices whose tours were replaced.
pub fn quantum_crossover<S: Scalar, R: Rng + ?Sized>(
    population: &mut [QuantumChromosome<S>],
    pc: f64,
    rng: &mut R,
) -> Vec<usize> {
    let mut changed = Vec::new();
    for pair in 0..population.len() / 2 {
        let (i, j) = (2 * pair, 2 * pair + 1);
        if rng.gen::<f64>() >= pc {
            continue;
        }
        let n = population[i].cities();
        let (a, b) = random_cut(n, rng);
        let (c1, c2) = order_crossover(&population[i].tour, &population[j].tour, a, b).expect("valid cut");
        if c1 != population[i].tour {
            population[i].tour = c1;
            changed.push(i);
        }
        if c2 != population[j].tour {
            population[j].tour = c2;
            changed.push(j);
        }
    }
    changed
}

/// Each chromosome is picked with probability `pm_chrom`; each qubit of a
/// picked chromosome swaps `alpha` and `beta` with probability `pm_qubit`.
pub fn quantum_mutation<S: Scalar, R: Rng + ?Sized>(
    population: &mut [QuantumChromosome<S>],
    pm_chrom: f64,
    pm_qubit: f64,
    rng: &mut R,
) {
    for chrom in population.iter_mut() {
        if rng.gen::<f64>() >= pm_chrom {
            continue;
        }
        for q in chrom.qubits.iter_mut() {
            if rng.gen::<f64>() < pm_qubit {
                *q = q.flipped();
            }
        }
    }
}

/// Rotation step for a generation: `scale * generation_max / (generation + 1)`,
/// clamped to `cap` when one is given.
pub fn delta_theta<S: Scalar>(generation: usize, generation_max: usize, scale: S, cap: Option<S>) -> S {
    let raw = scale * S::of(generation_max as f64) / S::of(generation as f64 + 1.0);
    match cap {
        Some(cap) => raw.min(cap),
        None => raw,
    }
}

/// Turns each qubit toward `best_bits`: by `+theta` where the best bit is 1
/// and the chromosome measured 0, by `-theta` in the opposite case, not at
/// all where they agree. The chromosome at `skip` is left untouched.
pub fn rotation_update<S: Scalar>(
    population: &mut [QuantumChromosome<S>],
    best_bits: &[bool],
    theta: S,
    skip: Option<usize>,
) {
    for (idx, chrom) in population.iter_mut().enumerate() {
        if Some(idx) == skip {
            continue;
        }
        for ((q, &bit), &target) in chrom.qubits.iter_mut().zip(&chrom.last_bits).zip(best_bits) {
            match (target, bit) {
                (true, false) => *q = q.rotated(theta),
                (false, true) => *q = q.rotated(-theta),
                _ => {}
            }
        }
    }
}

/// Runs the QGA on a prepared distance matrix.
pub fn run_qga_on<S: Scalar>(dmat: &DistanceMatrix<S>, params: &QgaParams) -> Result<RunRecord<S>> {
    params.validate()?;
    let n = dmat.n();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let start = Instant::now();

    let mut population = init_quantum_population::<S, _>(n, params, &mut rng)?;
    let bits = population[0].bits;
    let pm_qubit = params.qubit_mutation_prob_for(n);
    let scale = S::of(params.theta_scale);
    let cap = params.theta_cap.map(S::of);

    let mut best_tour = population[0].tour.clone();
    let mut best_len = S::infinity();
    let mut curve = Vec::with_capacity(params.generation_max);

    for generation in 0..params.generation_max {
        if generation > 0 {
            for chrom in population.iter_mut() {
                chrom.observe(params.measurement, &mut rng);
            }
        }

        let mut lengths = elite_replace(&mut population, dmat, params.elite_count);
        // Sorted, so the first entry is this generation's best measured tour.
        if lengths[0] < best_len {
            best_len = lengths[0];
            best_tour = population[0].tour.clone();
        }

        for i in quantum_crossover(&mut population, params.crossover_prob, &mut rng) {
            lengths[i] = dmat.cycle_length(population[i].tour.as_slice());
            if lengths[i] < best_len {
                best_len = lengths[i];
                best_tour = population[i].tour.clone();
            }
        }

        quantum_mutation(&mut population, params.chromosome_mutation_prob, pm_qubit, &mut rng);

        let target = encode_wrapped(&best_tour, bits);
        let current_best = lengths
            .iter()
            .enumerate()
            .min_by(|a, b| by_length(*a.1, *b.1))
            .map(|(i, _)| i);
        let theta = delta_theta(generation, params.generation_max, scale, cap);
        rotation_update(&mut population, &target, theta, current_best);

        curve.push(best_len);
    }

    Ok(RunRecord::new(
        best_tour,
        curve,
        start.elapsed().as_secs_f64(),
        params.seed,
    ))
}

/// Runs the QGA on `inst` under `metric`.
pub fn run_qga<S: Scalar>(inst: &TspInstance, metric: DistanceMetric, params: &QgaParams) -> Result<RunRecord<S>> {
    let dmat = distance_matrix::<S>(inst, metric)?;
    run_qga_on(&dmat, params)
}

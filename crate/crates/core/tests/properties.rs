mod common;

use proptest::prelude::*;
use qga_tsp::ga::{order_crossover, swap_mutation};
use qga_tsp::qga::{
    bits_per_gene, decode_and_repair, decode_genes, delta_theta, encode_tour, init_quantum_population,
    quantum_mutation, rotation_update, BitsRule,
};
use qga_tsp::tsplib::EdgeWeightType;
use qga_tsp::{
    distance_matrix, parse_instance, run_ga_on, run_qga_on, DistanceMatrix, DistanceMetric, GaParams, QgaParams, Qubit,
    Tour, TspInstance,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1000.0..1000.0f64, -1000.0..1000.0f64), 3..max)
}

fn permutation(n: usize, seed: u64) -> Tour {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Tour::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_is_symmetric_with_zero_diagonal(pts in points(40)) {
        let d = DistanceMatrix::<f64>::euclidean(&pts);
        for i in 0..d.n() {
            prop_assert_eq!(d.get(i, i), 0.0);
            for j in 0..d.n() {
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                prop_assert!(d.get(i, j) >= 0.0);
            }
        }
    }

    #[test]
    fn length_ignores_rotation_and_direction(pts in points(40), seed in any::<u64>(), shift in 0usize..40) {
        let d = DistanceMatrix::<f64>::euclidean(&pts);
        let t = permutation(d.n(), seed);
        let len = d.tour_length(&t).unwrap();
        let mut rot = t.as_slice().to_vec();
        rot.rotate_left(shift % d.n());
        let mut rev = t.as_slice().to_vec();
        rev.reverse();
        prop_assert!((d.tour_length(&Tour::new(rot).unwrap()).unwrap() - len).abs() <= 1e-9 * len.max(1.0));
        prop_assert!((d.tour_length(&Tour::new(rev).unwrap()).unwrap() - len).abs() <= 1e-9 * len.max(1.0));
    }

    #[test]
    fn canonical_form_is_shared_by_equivalent_tours(n in 3usize..30, seed in any::<u64>(), shift in 0usize..30) {
        let t = permutation(n, seed);
        let mut rot = t.as_slice().to_vec();
        rot.rotate_left(shift % n);
        rot.reverse();
        let other = Tour::new(rot).unwrap();
        prop_assert_eq!(t.canonical(), other.canonical());
        prop_assert_eq!(t.canonical().as_slice()[0], 0);
    }

    #[test]
    fn coordinate_files_round_trip(pts in points(30), display in any::<bool>()) {
        let mut inst = TspInstance::from_coords("rt", pts);
        if display {
            inst.coord_source = Some(qga_tsp::tsplib::CoordSource::DisplayData);
            let n = inst.dimension;
            inst.explicit_weights = Some((0..n * n).map(|k| ((k / n) as f64 - (k % n) as f64).abs()).collect());
            inst.declared_metric = EdgeWeightType::Explicit;
        }
        let once = parse_instance(&inst.to_tsplib()).unwrap();
        let twice = parse_instance(&once.to_tsplib()).unwrap();
        prop_assert_eq!(&once, &inst);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn order_crossover_yields_permutations(n in 4usize..=64, s1 in any::<u64>(), s2 in any::<u64>(), a in 0usize..64, len in 1usize..64) {
        let (p1, p2) = (permutation(n, s1), permutation(n, s2));
        let a = a % n;
        let b = (a + len).min(n);
        let (c1, c2) = order_crossover(&p1, &p2, a, b).unwrap();
        prop_assert!(qga_tsp::tour::is_permutation(c1.as_slice()));
        prop_assert!(qga_tsp::tour::is_permutation(c2.as_slice()));
        prop_assert_eq!(&c1.as_slice()[a..b], &p1.as_slice()[a..b]);
        prop_assert_eq!(&c2.as_slice()[a..b], &p2.as_slice()[a..b]);
    }

    #[test]
    fn swap_mutation_yields_permutations(n in 3usize..64, seed in any::<u64>()) {
        let t = permutation(n, seed);
        let m = swap_mutation(&t, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        prop_assert!(qga_tsp::tour::is_permutation(m.as_slice()));
        let moved = t.as_slice().iter().zip(m.as_slice()).filter(|(x, y)| x != y).count();
        prop_assert_eq!(moved, 2);
    }

    #[test]
    fn encode_decode_round_trip(n in 3usize..200, seed in any::<u64>()) {
        let t = permutation(n, seed);
        let b = bits_per_gene(n, BitsRule::CeilLog2);
        let bits = encode_tour(&t, b).unwrap();
        prop_assert_eq!(bits.len(), n * b as usize);
        prop_assert_eq!(decode_genes(&bits, n, b), t.as_slice().to_vec());
        prop_assert_eq!(decode_and_repair(&bits, n, b), t);
    }

    #[test]
    fn repair_always_yields_a_permutation(n in 3usize..100, floor in any::<bool>(), seed in any::<u64>()) {
        let rule = if floor { BitsRule::FloorLog2 } else { BitsRule::CeilLog2 };
        let b = bits_per_gene(n, rule);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<bool> = (0..n * b as usize).map(|_| rand::Rng::gen(&mut rng)).collect();
        let t = decode_and_repair(&bits, n, b);
        prop_assert_eq!(t.len(), n);
        prop_assert!(qga_tsp::tour::is_permutation(t.as_slice()));
    }

    #[test]
    fn delta_theta_is_nonincreasing(gmax in 1usize..2000, scale in 0.0001..1.0f64, cap in prop::option::of(0.001..1.0f64)) {
        let mut prev = f64::INFINITY;
        for g in 0..gmax {
            let d = delta_theta(g, gmax, scale, cap);
            prop_assert!(d <= prev);
            prop_assert!(d > 0.0);
            if let Some(c) = cap {
                prop_assert!(d <= c);
            }
            prev = d;
        }
    }

    #[test]
    fn rotation_leaves_matched_bits_alone(n in 3usize..30, seed in any::<u64>(), theta in -1.0..1.0f64) {
        let params = QgaParams { population_size: 4, ..QgaParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pop = init_quantum_population::<f64, _>(n, &params, &mut rng).unwrap();
        let before = pop.clone();
        let targets: Vec<Vec<bool>> = pop.iter().map(|c| c.last_bits.clone()).collect();
        // Each chromosome agrees with its own measurement everywhere.
        for (k, target) in targets.iter().enumerate() {
            rotation_update(&mut pop[k..k + 1], target, theta, None);
        }
        prop_assert_eq!(pop, before);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn amplitudes_stay_normalised(n in 3usize..20, seed in any::<u64>()) {
        let params = QgaParams { population_size: 6, ..QgaParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pop = init_quantum_population::<f64, _>(n, &params, &mut rng).unwrap();
        let check = |pop: &[qga_tsp::QuantumChromosome<f64>]| {
            pop.iter().flat_map(|c| &c.qubits).all(|q| (q.norm_sqr() - 1.0).abs() <= 1e-9)
        };
        prop_assert!(check(&pop));
        quantum_mutation(&mut pop, 1.0, 0.5, &mut rng);
        prop_assert!(check(&pop));
        let target: Vec<bool> = pop[0].last_bits.iter().map(|b| !b).collect();
        for g in 0..10_000 {
            let theta = delta_theta(g % 500, 500, 0.01, Some(0.05 * std::f64::consts::PI));
            rotation_update(&mut pop, &target, if g % 3 == 0 { -theta } else { theta }, None);
        }
        prop_assert!(check(&pop));
    }

    #[test]
    fn single_qubit_survives_many_rotations(theta0 in 0.0..std::f64::consts::FRAC_PI_2, step in -0.2..0.2f64) {
        let mut q = Qubit::<f64>::initial(theta0);
        for _ in 0..10_000 {
            q = q.rotated(step);
        }
        prop_assert!((q.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn ga_curve_is_monotone_and_reproducible(pts in points(20), seed in any::<u64>()) {
        let d = DistanceMatrix::<f64>::euclidean(&pts);
        let params = GaParams { population_size: 20, generation_max: 40, seed, ..GaParams::default() };
        let a = run_ga_on(&d, &params).unwrap();
        let b = run_ga_on(&d, &params).unwrap();
        prop_assert_eq!(a.fitness_curve.len(), 40);
        prop_assert!(a.fitness_curve.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(
            a.fitness_curve.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.fitness_curve.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        prop_assert_eq!(&a.best_tour, &b.best_tour);
        prop_assert_eq!(a.best_length, d.tour_length(&b.best_tour).unwrap());
    }

    #[test]
    fn qga_curve_is_monotone_and_reproducible(pts in points(20), seed in any::<u64>()) {
        let d = DistanceMatrix::<f64>::euclidean(&pts);
        let params = QgaParams { generation_max: 40, seed, ..QgaParams::with_population(20) };
        let a = run_qga_on(&d, &params).unwrap();
        let b = run_qga_on(&d, &params).unwrap();
        prop_assert_eq!(a.fitness_curve.len(), 40);
        prop_assert!(a.fitness_curve.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(
            a.fitness_curve.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.fitness_curve.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        prop_assert_eq!(&a.best_tour, &b.best_tour);
        prop_assert_eq!(a.best_length, d.tour_length(&b.best_tour).unwrap());
    }
}

#[test]
fn bundled_instances_have_symmetric_matrices() {
    for name in ["burma14.tsp", "ulysses16.tsp", "bayg29.tsp", "att48.tsp"] {
        let inst = TspInstance::read(common::data(name)).unwrap();
        for metric in [
            DistanceMetric::EuclidRaw,
            DistanceMetric::canonical(inst.declared_metric),
        ] {
            let d = distance_matrix::<f64>(&inst, metric).unwrap();
            for i in 0..d.n() {
                assert_eq!(d.get(i, i), 0.0, "{name} {metric}");
                for j in 0..i {
                    assert_eq!(d.get(i, j), d.get(j, i), "{name} {metric}");
                }
            }
        }
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let pts = common::random_points(12, 5);
    let params = GaParams {
        population_size: 30,
        generation_max: 60,
        seed: 9,
        ..GaParams::default()
    };
    let r32 = run_ga_on(&DistanceMatrix::<f32>::euclidean(&pts), &params).unwrap();
    let d64 = DistanceMatrix::<f64>::euclidean(&pts);
    let len = d64.tour_length(&r32.best_tour).unwrap();
    assert!((r32.best_length as f64 - len).abs() < 1e-3 * len);
}

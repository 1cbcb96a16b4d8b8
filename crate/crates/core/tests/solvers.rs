mod common;

use common::*;
use qga_tsp::bench::run_repetitions;
use qga_tsp::bench::SolverParams;
use qga_tsp::{distance_matrix, held_karp, DistanceMatrix, DistanceMetric, GaParams, QgaParams, TspInstance};

fn burma14() -> DistanceMatrix<f64> {
    let inst = TspInstance::read(data("burma14.tsp")).unwrap();
    distance_matrix(&inst, DistanceMetric::EuclidRaw).unwrap()
}

#[test]
fn ga_solves_nine_cities_exactly() {
    let d = DistanceMatrix::<f64>::euclidean(&random_points(9, 404));
    let opt = held_karp(&d, 18).unwrap().optimal_length;
    let params = SolverParams::Ga(GaParams {
        generation_max: 200,
        ..GaParams::default()
    });
    let runs = run_repetitions(&d, &params, 10, 0).unwrap();
    let hits = runs.iter().filter(|r| (r.best_length - opt).abs() < 1e-9).count();
    assert!(hits >= 8, "{hits}/10 runs reached {opt}");
}

#[test]
fn ga_on_burma14_is_near_optimal() {
    let runs = run_repetitions(&burma14(), &SolverParams::Ga(GaParams::default()), 10, 1).unwrap();
    let close = runs.iter().filter(|r| within(r.best_length, BURMA14_OPT, 0.02)).count();
    assert!(close >= 8, "{close}/10 runs within 2%");
}

#[test]
fn qga_on_burma14_is_near_optimal() {
    let runs = run_repetitions(&burma14(), &SolverParams::Qga(QgaParams::default()), 10, 1).unwrap();
    let close = runs.iter().filter(|r| within(r.best_length, BURMA14_OPT, 0.05)).count();
    assert!(close >= 5, "{close}/10 runs within 5%");
}

#[test]
fn recorded_lengths_match_recorded_tours() {
    let d = burma14();
    for params in [
        SolverParams::Ga(GaParams {
            generation_max: 50,
            ..GaParams::default()
        }),
        SolverParams::Qga(QgaParams {
            generation_max: 50,
            ..QgaParams::default()
        }),
    ] {
        for r in run_repetitions(&d, &params, 4, 7).unwrap() {
            assert_eq!(r.best_length, d.tour_length(&r.best_tour).unwrap());
            assert_eq!(r.fitness_curve.len(), 50);
            assert_eq!(*r.fitness_curve.last().unwrap(), r.best_length);
            assert_eq!(r.fitness_curve[r.iterations_to_best], r.best_length);
            assert!(r.iterations_to_best == 0 || r.fitness_curve[r.iterations_to_best - 1] > r.best_length);
        }
    }
}

#[test]
fn floor_rule_and_compare_measurement_still_produce_tours() {
    use qga_tsp::qga::{BitsRule, Measurement};
    let d = burma14();
    for (bits_rule, measurement) in [
        (BitsRule::FloorLog2, Measurement::Stochastic),
        (BitsRule::CeilLog2, Measurement::Compare),
    ] {
        let p = QgaParams {
            generation_max: 30,
            bits_rule,
            measurement,
            ..QgaParams::default()
        };
        let r = qga_tsp::run_qga_on(&d, &p).unwrap();
        assert!(qga_tsp::tour::is_permutation(r.best_tour.as_slice()));
        assert!(r.best_length >= BURMA14_OPT - 1e-9);
    }
}

#[test]
fn repetitions_are_seeded_by_index() {
    let d = burma14();
    let params = SolverParams::Qga(QgaParams {
        generation_max: 20,
        ..QgaParams::default()
    });
    let runs = run_repetitions(&d, &params, 3, 40).unwrap();
    assert_eq!(runs.iter().map(|r| r.seed).collect::<Vec<_>>(), [40, 41, 42]);
    let single = params.with_seed(41).solve(&d).unwrap();
    assert_eq!(single.fitness_curve, runs[1].fitness_curve);
}

#[test]
fn ga_on_att48_tracks_published_result() {
    // Published GA best on att48 with the large parameter block.
    const PUBLISHED_GA_BEST: f64 = 33915.24;
    let inst = TspInstance::read(data("att48.tsp")).unwrap();
    let d = distance_matrix(&inst, DistanceMetric::EuclidRaw).unwrap();
    let params = GaParams {
        population_size: 120,
        crossover_prob: 0.9,
        mutation_prob: 0.3,
        generation_max: 600,
        ..GaParams::default()
    };
    let runs = run_repetitions(&d, &SolverParams::Ga(params), 10, 1).unwrap();
    let best = runs.iter().map(|r| r.best_length).fold(f64::INFINITY, f64::min);
    let mean = runs.iter().map(|r| r.best_length).sum::<f64>() / 10.0;
    assert!(within(best, PUBLISHED_GA_BEST, 0.06), "best {best}");
    assert!(within(mean, PUBLISHED_GA_BEST, 0.06), "mean {mean}");
}

#[test]
fn triangle_is_solved_at_generation_zero() {
    let d = DistanceMatrix::<f64>::euclidean(&[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]);
    let ga = qga_tsp::run_ga_on(
        &d,
        &GaParams {
            generation_max: 5,
            ..GaParams::default()
        },
    )
    .unwrap();
    let qga = qga_tsp::run_qga_on(
        &d,
        &QgaParams {
            generation_max: 5,
            ..QgaParams::default()
        },
    )
    .unwrap();
    for r in [ga, qga] {
        assert_eq!(r.best_length, 12.0);
        assert_eq!(r.iterations_to_best, 0);
    }
}

//! Repeated seeded runs, aggregate statistics and on-disk artifacts.
//!
//! Output layout for one experiment:
//!
//! ```text
//! <out_dir>/<instance>/<algorithm>/
//!     runs.csv  summary.csv  summary.json
//!     curve_<algorithm>_<run>.csv  tour_<algorithm>_best.svg
//! ```

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ga::{by_length, run_ga_on, GaParams, RunRecord};
use crate::qga::{run_qga_on, QgaParams};
use crate::scalar::Scalar;
use crate::tour::Tour;
use crate::tsplib::{distance_matrix, DistanceMatrix, DistanceMetric, TspInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ga,
    Qga,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ga => "ga",
            Algorithm::Qga => "qga",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverParams {
    Ga(GaParams),
    Qga(QgaParams),
}

impl SolverParams {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            SolverParams::Ga(_) => Algorithm::Ga,
            SolverParams::Qga(_) => Algorithm::Qga,
        }
    }

    pub fn generation_max(&self) -> usize {
        match self {
            SolverParams::Ga(p) => p.generation_max,
            SolverParams::Qga(p) => p.generation_max,
        }
    }

    /// Same parameters with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            SolverParams::Ga(p) => SolverParams::Ga(GaParams { seed, ..p.clone() }),
            SolverParams::Qga(p) => SolverParams::Qga(QgaParams { seed, ..p.clone() }),
        }
    }

    /// One run on a prepared matrix.
    pub fn solve<S: Scalar>(&self, dmat: &DistanceMatrix<S>) -> Result<RunRecord<S>> {
        match self {
            SolverParams::Ga(p) => run_ga_on(dmat, p),
            SolverParams::Qga(p) => run_qga_on(dmat, p),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub instance_path: PathBuf,
    pub metric: DistanceMetric,
    pub params: SolverParams,
    pub repetitions: usize,
    pub base_seed: u64,
}

/// The six result columns, in table order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateStats {
    pub optimal_solution: f64,
    pub average_optimal_solution: f64,
    pub optimal_iterations: usize,
    pub average_iterations: f64,
    pub max_execution_time_s: f64,
    pub average_execution_time_s: f64,
}

impl AggregateStats {
    pub fn from_records<S: Scalar>(records: &[RunRecord<S>]) -> Option<Self> {
        if records.is_empty() {
            return None;
        }
        let k = records.len() as f64;
        let bests: Vec<f64> = records.iter().map(|r| r.best_length.as_f64()).collect();
        let iters: Vec<usize> = records.iter().map(|r| r.iterations_to_best).collect();
        let times: Vec<f64> = records.iter().map(|r| r.wall_time_seconds).collect();
        Some(AggregateStats {
            optimal_solution: bests.iter().copied().fold(f64::INFINITY, f64::min),
            average_optimal_solution: bests.iter().sum::<f64>() / k,
            optimal_iterations: *iters.iter().min().expect("nonempty"),
            average_iterations: iters.iter().sum::<usize>() as f64 / k,
            max_execution_time_s: times.iter().copied().fold(0.0, f64::max),
            average_execution_time_s: times.iter().sum::<f64>() / k,
        })
    }
}

/// Everything a finished experiment produced.
#[derive(Debug, Clone)]
pub struct Experiment<S> {
    pub algorithm: Algorithm,
    /// Label used in file names and CSV rows.
    pub instance_name: String,
    pub instance: TspInstance,
    pub records: Vec<RunRecord<S>>,
    pub stats: AggregateStats,
}

impl<S: Scalar> Experiment<S> {
    /// Index of the run with the shortest tour; the earliest wins ties.
    pub fn best_run(&self) -> usize {
        self.records
            .iter()
            .enumerate()
            .min_by(|a, b| by_length(a.1.best_length, b.1.best_length))
            .map(|(i, _)| i)
            .expect("at least one run")
    }
}

/// File stem of an instance path, used as its label.
pub fn instance_label(path: &Path, inst: &TspInstance) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .unwrap_or_else(|| inst.name.clone())
}

/// Runs `repetitions` independent runs with seeds `base_seed + run_index`.
/// Runs execute in parallel; results are ordered by run index.
pub fn run_repetitions<S: Scalar>(
    dmat: &DistanceMatrix<S>,
    params: &SolverParams,
    repetitions: usize,
    base_seed: u64,
) -> Result<Vec<RunRecord<S>>> {
    if repetitions == 0 {
        return Err(Error::InvalidParams("repetitions must be at least 1".into()));
    }
    (0..repetitions)
        .into_par_iter()
        .map(|run_index| {
            let seed = base_seed.wrapping_add(run_index as u64);
            params.with_seed(seed).solve(dmat).map_err(|e| Error::Run {
                run_index,
                seed,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Executes a plan end to end, returning the per-run records and their aggregate.
pub fn run_experiment<S: Scalar>(plan: &ExperimentPlan) -> Result<(Vec<RunRecord<S>>, AggregateStats)> {
    let exp = run_experiment_full::<S>(plan)?;
    Ok((exp.records, exp.stats))
}

pub fn run_experiment_full<S: Scalar>(plan: &ExperimentPlan) -> Result<Experiment<S>> {
    let instance = TspInstance::read(&plan.instance_path)?;
    let instance_name = instance_label(&plan.instance_path, &instance);
    run_on_instance(
        instance,
        instance_name,
        plan.metric,
        &plan.params,
        plan.repetitions,
        plan.base_seed,
    )
}

/// Same as [`run_experiment_full`] for an instance already in memory.
pub fn run_on_instance<S: Scalar>(
    instance: TspInstance,
    instance_name: String,
    metric: DistanceMetric,
    params: &SolverParams,
    repetitions: usize,
    base_seed: u64,
) -> Result<Experiment<S>> {
    let dmat = distance_matrix::<S>(&instance, metric)?;
    let records = run_repetitions(&dmat, params, repetitions, base_seed)?;
    let stats = AggregateStats::from_records(&records).expect("repetitions >= 1");
    Ok(Experiment {
        algorithm: params.algorithm(),
        instance_name,
        instance,
        records,
        stats,
    })
}

#[derive(Serialize)]
struct RunRow<'a> {
    algorithm: &'a str,
    instance: &'a str,
    run_index: usize,
    seed: u64,
    best_length: f64,
    iterations_to_best: usize,
    time_seconds: f64,
}

#[derive(Serialize)]
pub struct SummaryRow<'a> {
    pub algorithm: &'a str,
    pub instance: &'a str,
    #[serde(flatten)]
    pub stats: &'a AggregateStats,
}

/// Header of `summary.csv`.
pub const SUMMARY_COLUMNS: [&str; 8] = [
    "algorithm",
    "instance",
    "optimal_solution",
    "average_optimal_solution",
    "optimal_iterations",
    "average_iterations",
    "max_execution_time_s",
    "average_execution_time_s",
];

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Directory that [`emit_artifacts`] writes into.
pub fn artifact_dir(out_dir: &Path, instance_name: &str, algorithm: Algorithm) -> PathBuf {
    out_dir.join(instance_name).join(algorithm.name())
}

/// Writes runs, summary, per-run curves and the best tour plot. Returns the
/// directory written to.
pub fn emit_artifacts<S: Scalar>(exp: &Experiment<S>, out_dir: &Path) -> Result<PathBuf> {
    let dir = artifact_dir(out_dir, &exp.instance_name, exp.algorithm);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let algo = exp.algorithm.name();

    let path = dir.join("runs.csv");
    let mut w = csv_writer(&path)?;
    for (run_index, r) in exp.records.iter().enumerate() {
        w.serialize(RunRow {
            algorithm: algo,
            instance: &exp.instance_name,
            run_index,
            seed: r.seed,
            best_length: r.best_length.as_f64(),
            iterations_to_best: r.iterations_to_best,
            time_seconds: r.wall_time_seconds,
        })
        .map_err(csv_err(&path))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let summary = SummaryRow {
        algorithm: algo,
        instance: &exp.instance_name,
        stats: &exp.stats,
    };
    let path = dir.join("summary.csv");
    let mut w = csv_writer(&path)?;
    // serde's flatten goes through a map, which csv cannot serialize; write fields by hand.
    w.write_record(SUMMARY_COLUMNS).map_err(csv_err(&path))?;
    let s = &exp.stats;
    w.write_record([
        algo.to_string(),
        exp.instance_name.clone(),
        s.optimal_solution.to_string(),
        s.average_optimal_solution.to_string(),
        s.optimal_iterations.to_string(),
        s.average_iterations.to_string(),
        s.max_execution_time_s.to_string(),
        s.average_execution_time_s.to_string(),
    ])
    .map_err(csv_err(&path))?;
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;

    for (run_index, r) in exp.records.iter().enumerate() {
        write_curve(&dir.join(format!("curve_{algo}_{run_index}.csv")), &r.fitness_curve)?;
    }

    if let Some(coords) = &exp.instance.coords {
        let best = &exp.records[exp.best_run()];
        let path = dir.join(format!("tour_{algo}_best.svg"));
        let title = format!("{} {} {:.3}", exp.instance_name, algo, best.best_length.as_f64());
        fs::write(&path, tour_svg(coords, &best.best_tour, &title)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(dir)
}

/// `generation,best_so_far` rows, one per generation.
pub fn write_curve<S: Scalar>(path: &Path, curve: &[S]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["generation", "best_so_far"]).map_err(csv_err(path))?;
    for (g, v) in curve.iter().enumerate() {
        w.write_record([g.to_string(), v.as_f64().to_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

const SVG_SIZE: f64 = 600.0;
const SVG_MARGIN: f64 = 30.0;

/// SVG 1.1 plot of the cities and the closed tour through them. The y axis
/// points up, as in the instance's coordinate system.
pub fn tour_svg(coords: &[(f64, f64)], tour: &Tour, title: &str) -> String {
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in coords {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(f64::EPSILON);
    let scale = (SVG_SIZE - 2.0 * SVG_MARGIN) / span;
    let px = |(x, y): (f64, f64)| {
        (
            SVG_MARGIN + (x - min_x) * scale,
            SVG_SIZE - SVG_MARGIN - (y - min_y) * scale,
        )
    };

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">"#
    );
    let _ = writeln!(svg, "  <title>{}</title>", xml_escape(title));
    let _ = writeln!(svg, r#"  <rect width="100%" height="100%" fill="white"/>"#);

    let mut points = Vec::with_capacity(tour.len() + 1);
    for &c in tour.as_slice().iter().chain(tour.as_slice().first()) {
        let (x, y) = px(coords[c]);
        points.push(format!("{x:.2},{y:.2}"));
    }
    let _ = writeln!(
        svg,
        r#"  <polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
    for (i, &p) in coords.iter().enumerate() {
        let (x, y) = px(p);
        let _ = writeln!(
            svg,
            r#"  <circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="crimson"><title>{}</title></circle>"#,
            i + 1
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

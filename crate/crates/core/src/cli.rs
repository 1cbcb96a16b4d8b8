//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{
    artifact_dir, emit_artifacts, instance_label, run_on_instance, tour_svg, write_curve, Algorithm, SolverParams,
};
use crate::error::{Error, Result};
use crate::exact::{held_karp, DEFAULT_LIMIT};
use crate::ga::GaParams;
use crate::qga::{BitsRule, Measurement, QgaParams};
use crate::tsplib::{distance_matrix, DistanceMetric, TspInstance};

#[derive(Debug, Parser)]
#[command(
    name = "qga-tsp",
    version,
    about = "Quantum-inspired and classical GA solvers for TSPLIB instances"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single seeded run; prints the best tour and writes its curve and plot.
    Solve(SolverArgs),
    /// Repeated runs with aggregate statistics.
    Bench {
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 10)]
        runs: usize,
    },
    /// Exact optimum by Held-Karp.
    Exact {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Euclid)]
        metric: MetricArg,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
    },
    /// Summary of a parsed instance.
    Info {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Ga,
    Qga,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    /// Unrounded Euclidean distance on the file's coordinates.
    Euclid,
    /// The metric the file declares, with TSPLIB rounding.
    Tsplib,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BitsRuleArg {
    Ceil,
    Floor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Stochastic,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Population 80, pc 0.7, pm 0.3, 500 generations.
    PaperSmall,
    /// Population 120, pc 0.9, pm 0.3, 600 generations.
    PaperLarge,
}

/// Population, pc, pm, generations.
impl Preset {
    pub fn values(self) -> (usize, f64, f64, usize) {
        match self {
            Preset::PaperSmall => (80, 0.7, 0.3, 500),
            Preset::PaperLarge => (120, 0.9, 0.3, 600),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Qga)]
    pub algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclid)]
    pub metric: MetricArg,
    /// Parameter block applied before the individual flags below.
    #[arg(long, value_enum, default_value_t = Preset::PaperSmall)]
    pub preset: Preset,
    #[arg(long)]
    pub pop: Option<usize>,
    #[arg(long)]
    pub pc: Option<f64>,
    #[arg(long)]
    pub pm: Option<f64>,
    #[arg(long)]
    pub generations: Option<usize>,
    /// Elite count; defaults to 1 for the GA and a fifth of the population for the QGA.
    #[arg(long)]
    pub elite: Option<usize>,
    /// Per-qubit flip probability inside a mutated QGA chromosome; defaults to 2 / (N * b).
    #[arg(long)]
    pub pm_qubit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = BitsRuleArg::Ceil)]
    pub bits_rule: BitsRuleArg,
    /// Rotation step clamp in radians, or `none`.
    #[arg(long, default_value = "0.15707963267948966", value_parser = parse_theta_cap)]
    pub theta_cap: ThetaCap,
    #[arg(long, value_enum, default_value_t = MeasureArg::Stochastic)]
    pub measure: MeasureArg,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaCap(pub Option<f64>);

fn parse_theta_cap(s: &str) -> std::result::Result<ThetaCap, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(ThetaCap(None));
    }
    let v: f64 = s
        .parse()
        .map_err(|_| format!("expected a number or `none`, got `{s}`"))?;
    if v > 0.0 {
        Ok(ThetaCap(Some(v)))
    } else {
        Err("theta cap must be positive".into())
    }
}

impl SolverArgs {
    pub fn metric_for(&self, inst: &TspInstance) -> DistanceMetric {
        resolve_metric(self.metric, inst)
    }

    pub fn params(&self) -> SolverParams {
        let (pop, pc, pm, generations) = self.preset.values();
        let pop = self.pop.unwrap_or(pop);
        let pc = self.pc.unwrap_or(pc);
        let pm = self.pm.unwrap_or(pm);
        let generation_max = self.generations.unwrap_or(generations);
        match self.algorithm {
            AlgorithmArg::Ga => SolverParams::Ga(GaParams {
                population_size: pop,
                crossover_prob: pc,
                mutation_prob: pm,
                generation_max,
                elite_count: self.elite.unwrap_or(1),
                seed: self.seed,
            }),
            AlgorithmArg::Qga => {
                let base = QgaParams::with_population(pop);
                SolverParams::Qga(QgaParams {
                    crossover_prob: pc,
                    chromosome_mutation_prob: pm,
                    qubit_mutation_prob: self.pm_qubit,
                    generation_max,
                    elite_count: self.elite.unwrap_or(base.elite_count),
                    theta_cap: self.theta_cap.0,
                    bits_rule: match self.bits_rule {
                        BitsRuleArg::Ceil => BitsRule::CeilLog2,
                        BitsRuleArg::Floor => BitsRule::FloorLog2,
                    },
                    measurement: match self.measure {
                        MeasureArg::Stochastic => Measurement::Stochastic,
                        MeasureArg::Compare => Measurement::Compare,
                    },
                    seed: self.seed,
                    ..base
                })
            }
        }
    }
}

fn resolve_metric(arg: MetricArg, inst: &TspInstance) -> DistanceMetric {
    match arg {
        MetricArg::Euclid => DistanceMetric::EuclidRaw,
        MetricArg::Tsplib => DistanceMetric::canonical(inst.declared_metric),
    }
}

/// Parses `argv` and runs it, writing human-readable output to `out` and
/// diagnostics to `err`. Returns the process exit status.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match run(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn write_out(out: &mut dyn Write, args: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(args).map_err(|e| Error::io("<stdout>", e))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        write_out($out, format_args!("{}\n", format_args!($($arg)*)))?
    };
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Solve(args) => solve(args, out),
        Command::Bench { solver, runs } => bench(solver, *runs, out),
        Command::Exact {
            instance,
            metric,
            limit,
        } => {
            let inst = TspInstance::read(instance)?;
            let metric = resolve_metric(*metric, &inst);
            let dmat = distance_matrix::<f64>(&inst, metric)?;
            let res = held_karp(&dmat, *limit)?;
            say!(out, "instance: {}", instance_label(instance, &inst));
            say!(out, "metric: {metric}");
            say!(out, "optimal_length: {:.3}", res.optimal_length);
            say!(out, "optimal_tour: {}", res.optimal_tour);
            Ok(())
        }
        Command::Info { instance } => {
            let inst = TspInstance::read(instance)?;
            say!(out, "name: {}", inst.name);
            say!(out, "dimension: {}", inst.dimension);
            say!(out, "edge_weight_type: {}", inst.declared_metric.keyword());
            match (&inst.coords, inst.coord_source) {
                (Some(c), Some(src)) => {
                    let (xs, ys): (Vec<f64>, Vec<f64>) = c.iter().copied().unzip();
                    let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    say!(out, "coordinates: {src:?}");
                    say!(out, "x_range: {} .. {}", lo(&xs), hi(&xs));
                    say!(out, "y_range: {} .. {}", lo(&ys), hi(&ys));
                }
                _ => say!(out, "coordinates: none"),
            }
            say!(out, "explicit_weights: {}", inst.explicit_weights.is_some());
            Ok(())
        }
    }
}

fn solve(args: &SolverArgs, out: &mut dyn Write) -> Result<()> {
    let inst = TspInstance::read(&args.instance)?;
    let label = instance_label(&args.instance, &inst);
    let metric = args.metric_for(&inst);
    let params = args.params();
    let dmat = distance_matrix::<f64>(&inst, metric)?;
    let rec = params.solve(&dmat)?;
    let algo = params.algorithm();

    say!(out, "instance: {label}");
    say!(out, "algorithm: {algo}");
    say!(out, "metric: {metric}");
    say!(out, "seed: {}", rec.seed);
    say!(out, "best_length: {:.3}", rec.best_length);
    say!(out, "iterations_to_best: {}", rec.iterations_to_best);
    say!(out, "time_seconds: {:.3}", rec.wall_time_seconds);
    say!(out, "best_tour: {}", rec.best_tour);

    let dir = artifact_dir(&args.out_dir, &label, algo);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_curve(&dir.join(format!("curve_{algo}_0.csv")), &rec.fitness_curve)?;
    if let Some(coords) = &inst.coords {
        let path = dir.join(format!("tour_{algo}_best.svg"));
        let title = format!("{label} {algo} {:.3}", rec.best_length);
        std::fs::write(&path, tour_svg(coords, &rec.best_tour, &title)).map_err(|e| Error::io(&path, e))?;
    }
    say!(out, "artifacts: {}", dir.display());
    Ok(())
}

fn bench(args: &SolverArgs, runs: usize, out: &mut dyn Write) -> Result<()> {
    let inst = TspInstance::read(&args.instance)?;
    let label = instance_label(&args.instance, &inst);
    let metric = args.metric_for(&inst);
    let params = args.params();
    let exp = run_on_instance::<f64>(inst, label, metric, &params, runs, args.seed)?;
    let dir = emit_artifacts(&exp, &args.out_dir)?;

    let algo: Algorithm = exp.algorithm;
    let s = &exp.stats;
    say!(out, "instance: {}", exp.instance_name);
    say!(out, "algorithm: {algo}");
    say!(out, "metric: {metric}");
    say!(
        out,
        "runs: {runs} (seeds {}..={})",
        args.seed,
        args.seed + runs as u64 - 1
    );
    say!(out, "optimal_solution: {:.3}", s.optimal_solution);
    say!(out, "average_optimal_solution: {:.3}", s.average_optimal_solution);
    say!(out, "optimal_iterations: {}", s.optimal_iterations);
    say!(out, "average_iterations: {:.1}", s.average_iterations);
    say!(out, "max_execution_time_s: {:.3}", s.max_execution_time_s);
    say!(out, "average_execution_time_s: {:.3}", s.average_execution_time_s);
    say!(out, "artifacts: {}", dir.display());
    Ok(())
}

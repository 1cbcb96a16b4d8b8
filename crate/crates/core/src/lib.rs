//! Quantum-inspired and classical genetic algorithms for the symmetric
//! traveling salesman problem.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`, which the CLI and harness use.

pub mod bench;
pub mod cli;
pub mod error;
pub mod exact;
pub mod ga;
pub mod qga;
pub mod scalar;
pub mod tour;
pub mod tsplib;

pub use error::{Error, Result};
pub use exact::{held_karp, ExactResult};
pub use ga::{run_ga, run_ga_on, GaParams, RunRecord};
pub use qga::{run_qga, run_qga_on, QgaParams, QuantumChromosome, Qubit};
pub use scalar::Scalar;
pub use tour::Tour;
pub use tsplib::{distance_matrix, parse_instance, tour_length, DistanceMatrix, DistanceMetric, TspInstance};

pub type DistanceMatrix64 = DistanceMatrix<f64>;
pub type DistanceMatrix32 = DistanceMatrix<f32>;
pub type RunRecord64 = RunRecord<f64>;
pub type ExactResult64 = ExactResult<f64>;
pub type Qubit64 = Qubit<f64>;
pub type QuantumChromosome64 = QuantumChromosome<f64>;

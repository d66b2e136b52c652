//! Experiment harness, file formats and command-line front end for
//! impulse-response based norm estimation.
//!
//! The numerics live in [`irnorm_core`]; this crate adds the flat
//! configuration format ([`config`]), dataset/result CSV files ([`csv_io`])
//! and the table, SNR-sweep and Monte Carlo experiments ([`experiment`]).

pub mod config;
pub mod csv_io;
pub mod error;
pub mod experiment;

pub use config::{Estimator, ExperimentConfig, SnrSpec, SystemEntry};
pub use error::{HarnessError, Result};
pub use experiment::{
    estimate_from_csv, mean_percent_error, percent_error, run_monte_carlo, run_snr_sweep,
    run_table, MonteCarloSummary, NoiseLevel, NormKind, RunResult, Summary,
};

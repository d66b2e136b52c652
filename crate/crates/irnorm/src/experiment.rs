//! Closed-loop norm-estimation experiments.
//!
//! Every experiment is a grid of independent cells `(system, noise level,
//! run)`. A cell draws its noise from a seed derived from the master seed and
//! its indices, simulates the loop, identifies the sensitivity IR with each
//! requested estimator and compares the resulting norms against the model.
//! Cells run in parallel and are collected in index order, so output does not
//! depend on scheduling.

use std::fmt;
use std::path::Path;

use irnorm_core::benchmarks::Loop;
use irnorm_core::signal::DEFAULT_REGISTER_LENGTH;
use irnorm_core::{
    awgn_for_snr, build_regression, closed_loop, ls_estimate, norms_from_ir, prbs,
    regularized_estimate, run_closed_loop, tune_hyperparameters, Dataset, ImpulseResponse,
    NoiseSpec, NormTriple, RegressionProblem, RngSeed,
};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{Estimator, ExperimentConfig};
use crate::csv_io;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormKind {
    H1,
    H2,
    Hinf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::H1, NormKind::H2, NormKind::Hinf];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::H1 => "H1",
            NormKind::H2 => "H2",
            NormKind::Hinf => "Hinf",
        }
    }

    pub fn of(self, n: &NormTriple) -> f64 {
        match self {
            NormKind::H1 => n.h1,
            NormKind::H2 => n.h2,
            NormKind::Hinf => n.hinf,
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Output noise level of one experiment cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    Snr(f64),
    NoiseFree,
}

impl From<Option<f64>> for NoiseLevel {
    fn from(snr: Option<f64>) -> Self {
        snr.map_or(NoiseLevel::NoiseFree, NoiseLevel::Snr)
    }
}

/// One norm estimate compared against its model value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub system: Option<usize>,
    pub norm: NormKind,
    pub snr_db: Option<NoiseLevel>,
    pub run: usize,
    pub real: Option<f64>,
    pub estimate: f64,
    pub percent_error: Option<f64>,
    pub seed: Option<u64>,
    pub estimator: Estimator,
    /// SHA-256 of the identification record the estimate came from.
    pub dataset_digest: String,
}

/// Mean percent error of one norm for one estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub norm: NormKind,
    pub estimator: Estimator,
    pub mpe: f64,
}

/// `100·|estimate − real| / real`.
pub fn percent_error(real: f64, estimate: f64) -> Result<f64> {
    if !(real > 0.0) {
        return Err(HarnessError::Config(format!(
            "reference value must be positive, got {real}"
        )));
    }
    Ok(100.0 * (estimate - real).abs() / real)
}

/// Arithmetic mean of the rows' percent errors.
pub fn mean_percent_error(results: &[RunResult]) -> Result<f64> {
    let errors: Vec<f64> = results.iter().filter_map(|r| r.percent_error).collect();
    if errors.is_empty() {
        return Err(HarnessError::Config("no percent errors to average".into()));
    }
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

/// MPE per (norm, estimator), in norm-then-estimator order.
pub fn summarize(results: &[RunResult]) -> Vec<Summary> {
    let mut keys: Vec<(NormKind, Estimator)> =
        results.iter().map(|r| (r.norm, r.estimator)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter_map(|(norm, estimator)| {
            let rows: Vec<RunResult> = results
                .iter()
                .filter(|r| r.norm == norm && r.estimator == estimator)
                .cloned()
                .collect();
            mean_percent_error(&rows).ok().map(|mpe| Summary {
                norm,
                estimator,
                mpe,
            })
        })
        .collect()
}

/// Noise seed of cell `(system, snr_index, run)`.
pub fn cell_seed(master: RngSeed, system_id: usize, snr_index: usize, run: usize) -> RngSeed {
    master.derive((system_id * 1_000_000 + snr_index * 1_000 + run) as u64)
}

/// PRBS seed of a system; shared by all of its cells.
pub fn excitation_seed(master: RngSeed, system_id: usize) -> RngSeed {
    master.derive((system_id * 1_000_000) as u64)
}

/// Identifies `g(0..M)` with the chosen estimator.
pub fn identify(problem: &RegressionProblem, estimator: Estimator) -> irnorm_core::Result<ImpulseResponse> {
    match estimator {
        Estimator::PlainLs => ls_estimate(problem),
        Estimator::RegularizedTc => {
            let params = tune_hyperparameters(problem)?;
            regularized_estimate(problem, &params)
        }
    }
}

pub fn dataset_digest(data: &Dataset) -> String {
    let mut hasher = Sha256::new();
    for x in data.r().iter().chain(data.v()) {
        hasher.update(x.to_le_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

struct Prepared<'a> {
    id: usize,
    system: &'a Loop,
    real: NormTriple,
    r: Vec<f64>,
    clean_output: Vec<f64>,
}

fn prepare<'a>(config: &'a ExperimentConfig) -> Result<Vec<Prepared<'a>>> {
    config
        .systems
        .iter()
        .map(|entry| {
            let on_system = |source| HarnessError::System {
                system: entry.id,
                source,
            };
            let (s, t) = closed_loop(&entry.system.plant, &entry.system.controller).map_err(on_system)?;
            let real = s.true_norms().map_err(on_system)?;
            let r = prbs(
                config.samples,
                DEFAULT_REGISTER_LENGTH,
                excitation_seed(config.master_seed, entry.id),
            )
            .map_err(on_system)?;
            let clean_output = t.simulate(&r);
            Ok(Prepared {
                id: entry.id,
                system: &entry.system,
                real,
                r,
                clean_output,
            })
        })
        .collect()
}

fn run_cell(
    prepared: &Prepared<'_>,
    config: &ExperimentConfig,
    snr_index: usize,
    snr: Option<f64>,
    run: usize,
    estimators: &[Estimator],
) -> Result<Vec<RunResult>> {
    let on_system = |source| HarnessError::System {
        system: prepared.id,
        source,
    };
    let seed = cell_seed(config.master_seed, prepared.id, snr_index, run);
    let noise = match snr {
        Some(snr_db) => awgn_for_snr(&prepared.clean_output, NoiseSpec { snr_db, seed }).map_err(on_system)?,
        None => vec![0.0; prepared.r.len()],
    };
    let data = run_closed_loop(
        &prepared.system.plant,
        &prepared.system.controller,
        &prepared.r,
        &noise,
    )
    .map_err(on_system)?;
    let digest = dataset_digest(&data);
    let problem = build_regression(&data, config.order).map_err(on_system)?;

    let mut rows = Vec::with_capacity(3 * estimators.len());
    for &estimator in estimators {
        let ir = identify(&problem, estimator).map_err(on_system)?;
        let estimate = norms_from_ir(&ir).map_err(on_system)?;
        for norm in NormKind::ALL {
            let real = norm.of(&prepared.real);
            let value = norm.of(&estimate);
            rows.push(RunResult {
                system: Some(prepared.id),
                norm,
                snr_db: Some(snr.into()),
                run,
                real: Some(real),
                estimate: value,
                percent_error: Some(percent_error(real, value)?),
                seed: Some(seed.0),
                estimator,
                dataset_digest: digest.clone(),
            });
        }
    }
    Ok(rows)
}

/// Runs every `(system, noise level, run)` cell with each estimator.
pub fn run_grid(config: &ExperimentConfig, estimators: &[Estimator]) -> Result<Vec<RunResult>> {
    config.validate()?;
    let prepared = prepare(config)?;
    let points = config.snr.points();
    let mut cells = Vec::new();
    for p in &prepared {
        for (snr_index, snr) in points.iter().enumerate() {
            for run in 0..config.runs {
                cells.push((p, snr_index, *snr, run));
            }
        }
    }
    let per_cell: Vec<Result<Vec<RunResult>>> = cells
        .par_iter()
        .map(|(p, snr_index, snr, run)| run_cell(p, config, *snr_index, *snr, *run, estimators))
        .collect();
    let mut rows = Vec::new();
    for cell in per_cell {
        rows.extend(cell?);
    }
    Ok(rows)
}

/// Table experiment: one estimate per configured system, noise level and run.
pub fn run_table(config: &ExperimentConfig) -> Result<Vec<RunResult>> {
    run_grid(config, &[config.estimator])
}

/// SNR sweep with per-norm MPE over all sweep points.
pub fn run_snr_sweep(config: &ExperimentConfig) -> Result<(Vec<RunResult>, Vec<Summary>)> {
    let rows = run_grid(config, &[config.estimator])?;
    let summary = summarize(&rows);
    Ok((rows, summary))
}

/// Paired comparison of the regularized and plain LS estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    /// Pooled over every SNR point.
    pub overall: Vec<Summary>,
    /// MPE per SNR point, in configuration order.
    pub by_snr: Vec<(NoiseLevel, Vec<Summary>)>,
    /// `100·(MPE_ls − MPE_tc)/MPE_ls` for H∞, pooled.
    pub hinf_reduction_percent: f64,
}

pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<(Vec<RunResult>, MonteCarloSummary)> {
    if config.runs < 2 {
        return Err(HarnessError::Config("Monte Carlo needs runs >= 2".into()));
    }
    let estimators = [Estimator::RegularizedTc, Estimator::PlainLs];
    let rows = run_grid(config, &estimators)?;
    let overall = summarize(&rows);
    let by_snr = config
        .snr
        .points()
        .into_iter()
        .map(|snr| {
            let level = NoiseLevel::from(snr);
            let at: Vec<RunResult> = rows.iter().filter(|r| r.snr_db == Some(level)).cloned().collect();
            (level, summarize(&at))
        })
        .collect();
    let hinf = |e: Estimator| {
        overall
            .iter()
            .find(|s| s.norm == NormKind::Hinf && s.estimator == e)
            .map(|s| s.mpe)
            .unwrap_or(f64::NAN)
    };
    let (tc, ls) = (hinf(Estimator::RegularizedTc), hinf(Estimator::PlainLs));
    Ok((
        rows,
        MonteCarloSummary {
            overall,
            by_snr,
            hinf_reduction_percent: 100.0 * (ls - tc) / ls,
        },
    ))
}

/// Identification and norm estimation on a logged `k,r,v` file.
pub fn estimate_from_csv(path: &Path, order: usize, estimator: Estimator) -> Result<NormTriple> {
    let file = std::fs::File::open(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let data = csv_io::read_dataset(file)?;
    estimate_from_dataset(&data, order, estimator)
}

pub fn estimate_from_dataset(data: &Dataset, order: usize, estimator: Estimator) -> Result<NormTriple> {
    let problem = build_regression(data, order)?;
    let ir = identify(&problem, estimator)?;
    Ok(norms_from_ir(&ir)?)
}

/// Rows for a norm triple that has no model reference.
pub fn unreferenced_rows(
    norms: &NormTriple,
    estimator: Estimator,
    seed: Option<u64>,
    digest: String,
) -> Vec<RunResult> {
    NormKind::ALL
        .iter()
        .map(|&norm| RunResult {
            system: None,
            norm,
            snr_db: None,
            run: 0,
            real: None,
            estimate: norm.of(norms),
            percent_error: None,
            seed,
            estimator,
            dataset_digest: digest.clone(),
        })
        .collect()
}

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use irnorm::csv_io::{read_dataset, write_results, write_summary};
use irnorm::experiment::{dataset_digest, estimate_from_dataset, unreferenced_rows};
use irnorm::{run_monte_carlo, run_snr_sweep, run_table, Estimator, ExperimentConfig, Summary};

#[derive(Parser)]
#[command(name = "irnorm", version, about = "H1/H2/H-infinity norm estimation from identified impulse responses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Tc,
    Ls,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Tc => Estimator::RegularizedTc,
            EstimatorArg::Ls => Estimator::PlainLs,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the norms of the system behind a `k,r,v` dataset.
    Norms {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "tc")]
        estimator: EstimatorArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Norms of every configured loop against the model values.
    Table {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimates over an SNR sweep, with per-norm MPE.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Paired Monte Carlo comparison of the TC and plain LS estimators.
    Mc {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// `results.csv` -> `results.summary.csv`.
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    path.with_file_name(format!("{stem}.{tag}.csv"))
}

fn print_summary(summary: &[Summary]) {
    for s in summary {
        println!("{:<5} {:<15} MPE {:.4} %", s.norm.name(), s.estimator.name(), s.mpe);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Norms {
            data,
            m,
            estimator,
            seed,
            out,
        } => {
            let file = File::open(&data).with_context(|| format!("cannot open {}", data.display()))?;
            let dataset = read_dataset(file).with_context(|| data.display().to_string())?;
            let norms = estimate_from_dataset(&dataset, m, estimator.into())?;
            let rows = unreferenced_rows(&norms, estimator.into(), seed, dataset_digest(&dataset));
            write_results(create(&out)?, &rows, false)?;
            println!("H1 {:.6}  H2 {:.6}  Hinf {:.6}", norms.h1, norms.h2, norms.hinf);
        }
        Command::Table { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let rows = run_table(&config)?;
            write_results(create(&out)?, &rows, false)?;
        }
        Command::Sweep { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let (rows, summary) = run_snr_sweep(&config)?;
            write_results(create(&out)?, &rows, false)?;
            write_summary(create(&sibling(&out, "summary"))?, &summary)?;
            print_summary(&summary);
        }
        Command::Mc { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let (rows, summary) = run_monte_carlo(&config)?;
            write_results(create(&out)?, &rows, true)?;
            write_summary(create(&sibling(&out, "summary"))?, &summary.overall)?;
            print_summary(&summary.overall);
            println!("Hinf MPE reduction vs plain LS: {:.4} %", summary.hinf_reduction_percent);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let chain: Vec<String> = err.chain().map(|e| e.to_string()).collect();
            eprintln!("error: {}", chain.join(": "));
            ExitCode::FAILURE
        }
    }
}

//! `qpca`: density-matrix exponentiation, quantum principal component
//! analysis and related experiments on a classical simulator.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{Context, Outcome};
use config::{ChoiParams, DiscriminateParams, ErrorCurveParams, ExperimentConfig, ExponentiateParams, QpcaParams};
use error::CliError;

#[derive(Parser)]
#[command(name = "qpca", version, about = "Quantum principal component analysis on a classical simulator")]
struct Cli {
    /// JSON configuration, or the manifest of an earlier run; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every sampled quantity
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel loops
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve `σ` under `e^{-iρt}` with partial swaps and compare to the exact result
    Exponentiate(ExponentiateParams),
    /// Trace-distance error of the partial-swap evolution over several step counts
    ErrorCurve(ErrorCurveParams),
    /// Phase-estimation spectrum and principal components of a state or dataset
    Qpca(QpcaParams),
    /// Assign a state to one of two labelled clusters
    Discriminate(DiscriminateParams),
    /// Spectrum and principal components of a channel's Choi state
    Choi(ChoiParams),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Exponentiate(_) => "exponentiate",
            Command::ErrorCurve(_) => "error-curve",
            Command::Qpca(_) => "qpca",
            Command::Discriminate(_) => "discriminate",
            Command::Choi(_) => "choi",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let file = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let base = ExperimentConfig {
        seed: cli.seed.or(file.seed),
        output_dir: cli.out.clone().or(file.output_dir.clone()),
        workers: cli.workers.or(file.workers),
        ..file.clone()
    };
    let cap = base.resolve_dimension_cap()?;
    qpca_core::linalg::set_dimension_cap(cap);
    let out = base.output_dir.clone().ok_or_else(|| error::missing("out"))?;
    if let Some(n) = base.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let seed = base.seed.unwrap_or(0);
    let ctx = Context { seed };
    let snapshot = ExperimentConfig { seed: Some(seed), ..base.snapshot(cap) };

    let name = cli.command.name();
    let Outcome { artifacts, snapshot, summary } = match cli.command {
        Command::Exponentiate(p) => commands::exponentiate(p.overlay(file.exponentiate), &ctx, snapshot),
        Command::ErrorCurve(p) => commands::error_curve(p.overlay(file.error_curve), &ctx, snapshot),
        Command::Qpca(p) => commands::qpca(p.overlay(file.qpca), &ctx, snapshot),
        Command::Discriminate(p) => commands::discriminate(p.overlay(file.discriminate), &ctx, snapshot),
        Command::Choi(p) => commands::choi(p.overlay(file.choi), &ctx, snapshot),
    }?;
    output::write_run(&out, name, &snapshot, &artifacts, start.elapsed())?;
    println!("{name}: {summary}");
    println!("wrote {} files to {}", artifacts.len() + 1, out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

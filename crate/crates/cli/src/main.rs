use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ris_cli::commands::{self, Run};
use ris_cli::config::ExperimentConfig;
use ris_cli::Result;
use ris_core::exec::Parallelism;
use ris_core::experiments::SweepAxis;

/// Beamforming design, outage and capacity experiments for RIS-aided MISO
/// links under Rician fading.
#[derive(Debug, Parser)]
#[command(name = "ris-sim", version)]
struct Cli {
    /// TOML configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `[output] dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo samples for this command.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    samples: Option<u64>,
    /// Base seed (overrides `[simulation] seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 or 1 runs sequentially). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the proposed beamformer and RIS phases.
    Design,
    /// Outage probability over the threshold grid.
    Outage,
    /// Ergodic capacity against the number of RIS elements.
    CapacityVsN,
    /// Ergodic capacity against the direct/indirect ratio.
    CapacityVsMu,
    /// Ergodic capacity against the departure-angle difference.
    CapacityVsTheta,
    /// Statistical and algebraic self-checks.
    Validate,
}

fn run(cli: Cli) -> Result<String> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = cli.samples {
        let s = &mut config.simulation;
        (s.outage_samples, s.sweep_samples, s.validate_samples) = (n, n, n);
    }
    if let Some(seed) = cli.seed {
        config.simulation.seed = seed;
    }
    let out_dir = cli.out.unwrap_or_else(|| config.output.dir.clone());
    let run = Run::new(config, out_dir, Parallelism::from_workers(cli.workers))?;
    match cli.command {
        Command::Design => commands::design(&run),
        Command::Outage => commands::outage(&run),
        Command::CapacityVsN => commands::capacity(&run, SweepAxis::Elements),
        Command::CapacityVsMu => commands::capacity(&run, SweepAxis::MuDb),
        Command::CapacityVsTheta => commands::capacity(&run, SweepAxis::Theta),
        Command::Validate => commands::validate(&run),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

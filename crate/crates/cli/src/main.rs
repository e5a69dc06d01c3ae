use std::path::PathBuf;
use std::process::ExitCode;

use affgap_cli::run::{self, RunContext, Status};
use affgap_cli::{error_code, ExperimentConfig};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "affgap", version, about = "Spectral-gap experiments for random walks on F_p^d ⋊ SL_d(F_p)")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for `scan` (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Build the product sets Π₁A..Π₂₉A explicitly in `growth`.
    #[arg(long, global = true)]
    materialize: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Walk gap, quotient gap and α for one measure.
    Gap,
    /// Sweep sampled generating sets over a list of primes.
    Scan,
    /// L² decay of the walk on F_p^d.
    Decay,
    /// Pure translation in Π₇A and the certificate Π₂₉A = G.
    Growth,
    /// L² flattening of repeated self-convolutions.
    Flatten,
    /// Distance to uniform against e^{−l·gap}.
    Mixing,
    /// Eigenvalue multiplicities of the walk operator.
    Multiplicity,
}

fn execute(cli: &Cli) -> anyhow::Result<Status> {
    let path = cli.config.as_ref().ok_or_else(|| anyhow::anyhow!("--config is required"))?;
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = RunContext { config, out: cli.out.clone(), materialize: cli.materialize };
    match cli.command {
        Command::Gap => run::run_gap(&ctx),
        Command::Scan => run::run_scan(&ctx),
        Command::Decay => run::run_decay(&ctx),
        Command::Growth => run::run_growth(&ctx),
        Command::Flatten => run::run_flatten(&ctx),
        Command::Mixing => run::run_mixing(&ctx),
        Command::Multiplicity => run::run_multiplicity(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(status) => {
            if status != Status::Pass {
                log::warn!("{:?} ({:?})", cli.command, status);
            }
            ExitCode::from(status.code() as u8)
        }
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::from(error_code(&e) as u8)
        }
    }
}

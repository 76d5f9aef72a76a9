use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tvprox_cli::commands::{self, Overrides};
use tvprox_cli::config::ExperimentConfig;
use tvprox_cli::CliError;

#[derive(Parser)]
#[command(
    name = "tvprox",
    version,
    about = "Distributed proximal gradient experiments over time-varying networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write the CSV trace and a JSON summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Trace CSV path (overrides output.trace).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Seed for data, graph and initialization.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Check the configured schedule's matrices and window connectivity.
    ValidateGraph {
        #[arg(long)]
        config: PathBuf,
        /// Number of slots to check; defaults to the slots a full run uses.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare closed-form proximal maps with a numerical 1-D oracle.
    ProxCheck {
        /// zero, l1, squared-l2, elastic-net or box
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print per-agent and global gradient Lipschitz constants.
    Lipschitz {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &PathBuf, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    overrides.apply(&mut cfg);
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run {
            config,
            output,
            seed,
            max_iter,
            alpha,
        } => {
            let overrides = Overrides {
                output,
                seed,
                max_iter,
                alpha,
            };
            commands::cmd_run(&load(&config, &overrides)?)
        }
        Command::ValidateGraph {
            config,
            horizon,
            seed,
        } => {
            let overrides = Overrides {
                seed,
                ..Overrides::default()
            };
            commands::cmd_validate_graph(&load(&config, &overrides)?, horizon)
        }
        Command::ProxCheck { kind, trials, seed } => commands::cmd_prox_check(&kind, trials, seed),
        Command::Lipschitz { config, seed } => {
            let overrides = Overrides {
                seed,
                ..Overrides::default()
            };
            commands::cmd_lipschitz(&load(&config, &overrides)?)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

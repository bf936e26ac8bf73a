use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

#[derive(Parser)]
#[command(
    name = "hammerstein",
    version,
    about = "Coupled iteration for Hammerstein equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the 2x2 matrix experiment from its three starting pairs.
    #[command(name = "solve-2d")]
    Solve2d {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Solve the forced pendulum through its Hammerstein form.
    Pendulum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Judge a step schedule against the convergence conditions.
    #[command(name = "validate-schedule")]
    ValidateSchedule {
        #[command(flatten)]
        common: Common,
    },
    /// Random sweeps of the functional inequalities.
    #[command(name = "check-lemmas")]
    CheckLemmas {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
pub struct Common {
    /// JSON configuration; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed for every sampled quantity.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct SolverFlags {
    /// Overrides the configured stopping tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Overrides the configured iteration cap.
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve2d { common, solver } => commands::solve_2d(common, solver),
        Command::Pendulum { common, solver } => commands::pendulum(common, solver),
        Command::ValidateSchedule { common } => commands::validate_schedule(common),
        Command::CheckLemmas { common } => commands::check_lemmas(common),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod files;

/// Geometric coherence and minimum-error discrimination of pure states.
#[derive(Debug, Parser)]
#[command(name = "geocoh", version)]
struct Cli {
    /// Seed for every randomized solver.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Stopping threshold on the per-step gain of the iterative solvers.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Helstrom,
    Gso,
    Search,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Geometric coherence, closest incoherent state and bounds of a density matrix.
    Coherence {
        /// Matrix file.
        input: PathBuf,
        /// Skip the closed forms for qubits and X-states.
        #[arg(long)]
        numerical: bool,
    },
    /// Best von Neumann measurement for a pure-state ensemble.
    Discriminate {
        /// Ensemble file.
        input: PathBuf,
        #[arg(long, value_enum, default_value = "search")]
        method: MethodArg,
    },
    /// QSD-state of an ensemble, as a matrix file.
    QsdState {
        /// Ensemble file.
        input: PathBuf,
        /// Number of copies of every state.
        #[arg(long, default_value_t = 1)]
        copies: u32,
    },
    /// Optimal measurement of a linearly independent ensemble via its QSD-state.
    Recover {
        /// Ensemble file.
        input: PathBuf,
    },
    /// Run the numerical checks and print one verdict per check.
    Reproduce {
        /// Smaller samples; finishes in a few seconds.
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = commands::Options { seed: cli.seed, tol: cli.tol, output: cli.output };
    let result = match cli.command {
        Command::Coherence { input, numerical } => commands::coherence(&opts, &input, numerical),
        Command::Discriminate { input, method } => commands::discriminate(&opts, &input, method),
        Command::QsdState { input, copies } => commands::qsd_state(&opts, &input, copies),
        Command::Recover { input } => commands::recover(&opts, &input),
        Command::Reproduce { quick } => commands::reproduce(&opts, quick),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! `ipdg`: command-line front end for the IPDG elasticity eigensolver.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ipdg_core::Error;

#[derive(Parser)]
#[command(
    name = "ipdg",
    version,
    about = "IPDG eigenvalue solver for 2D elasticity in displacement-pressure form"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct RunArgs {
    /// Run configuration (TOML).
    pub config: PathBuf,
    /// Overrides `[study].output`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and report the lowest eigenvalues.
    Solve(RunArgs),
    /// Stabilization sweep over (k, a) with spurious-mode flags.
    Sweep(RunArgs),
    /// Uniform refinement with rate fitting and extrapolation.
    Uniform(RunArgs),
    /// Adaptive refinement driven by the a posteriori estimator.
    Adapt(RunArgs),
    /// First eigenvalue and effectivity across Young moduli.
    Robust(RunArgs),
    /// Mesh utilities.
    #[command(subcommand)]
    Mesh(MeshCommand),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum AxisArg {
    Horizontal,
    Vertical,
}

#[derive(Subcommand)]
pub enum MeshCommand {
    /// Write a structured unit-square mesh.
    Gen {
        /// Cells per side.
        #[arg(long)]
        n: usize,
        /// Clamped sides (comma separated: bottom,right,top,left).
        #[arg(long, value_delimiter = ',', default_value = "bottom")]
        dirichlet: Vec<String>,
        /// Two-material interface direction (ids 0 and 1).
        #[arg(long, requires = "split_at")]
        split: Option<AxisArg>,
        #[arg(long)]
        split_at: Option<f64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Read a mesh file and print its statistics.
    Check { file: PathBuf },
}

/// Exit status per error category.
fn exit_code(err: &Error) -> u8 {
    match err.category() {
        "input" => 2,
        "numerical" => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Uniform(a) => commands::uniform(&a),
        Command::Adapt(a) => commands::adapt(&a),
        Command::Robust(a) => commands::robust(&a),
        Command::Mesh(m) => commands::mesh(m),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error ({}): {e}", e.category());
            ExitCode::from(exit_code(&e))
        }
    }
}

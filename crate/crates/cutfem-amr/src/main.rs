//! Command-line driver: run a JSON config or one of the built-in examples.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on solver
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cutfem::config::{ExampleSel, RunConfig};
use cutfem::error::RunError;
use cutfem::runner::{run_config_file, run_resolved};

#[derive(Parser)]
#[command(name = "cutfem-amr", about = "Adaptive CutFEM solver for the Poisson problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run from a JSON configuration file.
    Run {
        /// Path to the configuration file.
        config: PathBuf,
    },
    /// Run one of the built-in benchmark examples with default settings.
    Example {
        /// Example number (1-4).
        number: u8,
        /// Refine every element instead of Doerfler marking.
        #[arg(long)]
        uniform: bool,
        /// Drop the boundary-correction term from the estimator.
        #[arg(long)]
        no_bc: bool,
        /// Stop once the solved system exceeds this many unknowns.
        #[arg(long, value_name = "N")]
        max_dof: Option<usize>,
        /// Doerfler bulk fraction.
        #[arg(long, value_name = "T")]
        theta: Option<f64>,
        /// Reentrant corner angle for example 3.
        #[arg(long, value_name = "W")]
        omega: Option<f64>,
    },
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let out_dir = std::env::current_dir()?;
    let summary = match cli.command {
        Command::Run { config } => run_config_file(&config, &out_dir)?,
        Command::Example {
            number,
            uniform,
            no_bc,
            max_dof,
            theta,
            omega,
        } => {
            let config = RunConfig {
                example: ExampleSel::Number(number),
                n0: None,
                bbox: None,
                theta,
                beta: None,
                gamma: None,
                max_dofs: max_dof,
                max_steps: None,
                with_bc: if no_bc { Some(false) } else { None },
                gh_mode: None,
                uniform: if uniform { Some(true) } else { None },
                omega,
                vtk_every: None,
                seed_free: None,
                example1_yi: None,
                level_set: None,
            };
            let resolved = config.resolve()?;
            run_resolved(&resolved, &out_dir)?
        }
    };

    let last = summary.records.last().expect("at least one record");
    eprintln!(
        "finished after {} steps: ndof = {}, eta = {:.6e}",
        summary.records.len(),
        last.ndof,
        last.eta
    );
    eprintln!("wrote {}", summary.csv_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Solver(msg)) => {
            eprintln!("solver error: {msg}");
            ExitCode::from(3)
        }
        Err(RunError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(1)
        }
    }
}

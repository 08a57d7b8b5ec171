//! Command-line front end: witness curves, parameter sweeps and grid-oracle
//! verification runs.

mod config;
mod error;
mod output;
mod sweep;
mod verify;
mod witness;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "gie-lab", version, about = "Gravitationally induced entanglement: witnesses and grid checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Witness curves W(t) for the Newton, NS and NSB potentials
    Witness(witness::WitnessArgs),
    /// Sweep d, delta or m and record a witness objective per point
    Sweep(sweep::SweepArgs),
    /// Run a grid-oracle verification scenario
    PdeVerify(verify::VerifyArgs),
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("GIE_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("GIE_LAB_THREADS must be a non-negative integer, got '{raw}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("cannot configure worker pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<u8> {
    configure_threads()?;
    match cli.command {
        Command::Witness(args) => witness::run(args).map(|()| 0),
        Command::Sweep(args) => sweep::run(args).map(|()| 0),
        Command::PdeVerify(args) => verify::run(args).map(|pass| if pass { 0 } else { 1 }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

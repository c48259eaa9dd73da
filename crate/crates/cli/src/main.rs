use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use lagwave::config::{self, ConfigError};
use lagwave::{commands, init_threads};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Sample and export the background profiles.
    Profile,
    /// Run the solver and write snapshots plus the ledger.
    Simulate,
    /// Run the acceptance checks for the scenario kind.
    Verify,
    /// Manufactured-solution refinement study.
    Convergence,
    /// Print the dielectric bound and stability limits.
    Bounds,
}

/// Viscous contact and rarefaction waves for the Navier-Stokes-Maxwell system.
#[derive(Debug, Parser)]
#[command(name = "lagwave", version)]
struct Cli {
    command: Command,
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the scenario's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run even when epsilon is not below the dielectric bound.
    #[arg(long)]
    override_dielectric_bound: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    init_threads()?;
    let text = config::read_config(&cli.config)?;
    let mut scenario = config::parse_config_str_unchecked(&text)?;
    scenario.override_dielectric_bound |= cli.override_dielectric_bound;
    match scenario.validate() {
        Ok(()) => {}
        // `bounds` reports the violation itself.
        Err(ConfigError::DielectricBound { .. }) if matches!(cli.command, Command::Bounds) => {}
        Err(e) => return Err(e.into()),
    }
    let out = cli.out.unwrap_or_else(|| scenario.output_dir.clone());
    match cli.command {
        Command::Profile => commands::profile(&scenario, &out),
        Command::Simulate => commands::simulate(&scenario, &out),
        Command::Verify => commands::verify(&scenario, &out),
        Command::Convergence => commands::convergence(&scenario, &out),
        Command::Bounds => commands::bounds(&scenario),
    }
}

use std::process::ExitCode;

use clap::Parser;
use dipolefield_cli::args::{Cli, Command};
use dipolefield_cli::config::{self, FileConfig};
use dipolefield_cli::{commands, CliError, Outcome};

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Constants(a) => commands::constants(&config::constants_settings(a, &cfg)?),
        Command::Analytic(a) => commands::analytic(&config::analytic_settings(a, &cfg)?),
        Command::Simulate(a) => commands::simulate(&config::simulate_settings(a, &cfg)?),
        Command::Compare(a) => commands::compare_files(&config::compare_settings(a, &cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

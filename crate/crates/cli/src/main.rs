//! `means-lab`: evaluate means, decide and falsify their Jensen convexity,
//! and cross-validate the two. Every run prints one JSON report.
//!
//! Exit codes: 0 success, 1 cross-validation disagreement, 2 usage error,
//! 3 domain or evaluation error.

mod args;
mod run;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use means_lab::RunReport;

use args::Cli;
use run::{execute, CliError};

fn emit(cli: &Cli, report: &RunReport) -> Result<(), CliError> {
    let json = report.to_json().map_err(|e| CliError::Io(e.into()))?;
    match &cli.out {
        Some(path) => std::fs::write(path, json).map_err(CliError::Io),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let started = Instant::now();
    let mut report = RunReport::new(std::env::args().skip(1).collect());
    let outcome = execute(&cli.command, cli.seed, &mut report);
    if cli.timing {
        report.elapsed_ms = Some(started.elapsed().as_millis() as u64);
    }
    match outcome {
        Ok(clean) => {
            if let Err(e) = emit(&cli, &report) {
                eprintln!("{e}");
                return ExitCode::from(e.exit_code());
            }
            if clean {
                ExitCode::SUCCESS
            } else {
                eprintln!("cross-validation found disagreements");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

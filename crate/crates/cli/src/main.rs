use std::process::ExitCode;

use clap::Parser;
use tadic_cli::{run, CliError, Command, JobConfig, Overrides};

/// T-adic L-functions of Z_p-towers on the affine line and the torus.
#[derive(Parser)]
#[command(name = "tadic", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let config = JobConfig::resolve(cli.command, &cli.overrides)?;
    let report = run(&config)?;
    let json = report.to_json();
    match &config.out {
        Some(path) => std::fs::write(path, json)?,
        None => print!("{json}"),
    }
    if let Some(cmp) = report.comparison.as_ref().and_then(|c| c.first_difference.as_ref()) {
        eprintln!(
            "mismatch at s^{} T^{}: {} vs {} (mod p^{})",
            cmp.s_index, cmp.t_index, cmp.left, cmp.right, report.effective_digits
        );
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check {} failed: {}", c.name, c.detail);
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("tadic: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

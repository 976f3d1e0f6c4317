use std::process::ExitCode;

use bdflow_cli::{dispatch, parse_config, Cli, CliError};
use clap::Parser;

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = parse_config(&cli.command)?;
    let outcome = dispatch(&cfg)?;
    for line in &outcome.lines {
        println!("{line}");
    }
    if !cfg.assert {
        return Ok(());
    }
    for (what, passed) in &outcome.checks {
        println!("{} {what}", if *passed { "PASS" } else { "FAIL" });
    }
    outcome.verdict()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(&Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bdflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

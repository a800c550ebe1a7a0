#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod figures;
mod table;

use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::{usage, CliError, CliResult};

const THREADS_VAR: &str = "TELEX_THREADS";

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}"))),
        _ => usage(format!(
            "{THREADS_VAR} must be a positive integer, got `{raw}`"
        )),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    let table = match &cli.command {
        Command::ExitProb(a) => commands::cmd_exit_prob(a)?,
        Command::ExitTime(a) => commands::cmd_exit_time(a)?,
        Command::Strip(a) => commands::cmd_strip(a)?,
        Command::Simulate(a) => commands::cmd_simulate(a)?,
        Command::Figure(a) => {
            for f in figures::cmd_figure(a, cli.out.as_ref(), cli.format)? {
                println!("{f}");
            }
            return Ok(());
        }
    };
    match &cli.out {
        Some(path) => table.write(BufWriter::new(File::create(path)?), cli.format)?,
        None => table.write(io::stdout().lock(), cli.format)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

mod args;
mod commands;
mod input;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use holant::HolantError;

use args::{Cli, Format};

const EXIT_VIOLATION: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_PARSE: u8 = 3;

fn exit_code(e: &HolantError) -> u8 {
    match e {
        HolantError::BudgetExceeded { .. } => EXIT_BUDGET,
        HolantError::Parse(_) | HolantError::Io(_) | HolantError::Json(_) => EXIT_PARSE,
        _ => EXIT_VIOLATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_PARSE),
            };
        }
    };
    if cli.common.eps.is_nan() || cli.common.eps <= 0.0 {
        eprintln!("error: --eps must be positive, got {}", cli.common.eps);
        return ExitCode::from(EXIT_PARSE);
    }
    if let Some(threads) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    }
    match commands::run(&cli.command, &cli.common) {
        Ok(out) => {
            match cli.common.format {
                Format::Json => println!("{}", out.json),
                Format::Text => print!("{}", out.text),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATION)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

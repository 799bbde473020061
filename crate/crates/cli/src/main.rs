//! `spdcfc`: command-line front end for the fiber-coupling model.
//!
//! Exit codes: 0 success, 1 domain or convergence error, 2 usage error.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod format;

use args::{Cli, Command};
use clap::error::ErrorKind;
use clap::Parser;
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match &cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Params(a) => commands::params(a),
    };
    match out {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            if e.exit_code() == 2 {
                eprintln!("run `spdcfc help` for usage");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod grid;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ctpa(a) => commands::run_ctpa(a),
        Command::Etpa(a) => commands::run_etpa(a),
        Command::Mcs(a) => commands::run_mcs(a),
        Command::McsScan(a) => commands::run_mcs_scan(a),
        Command::TeSweep(a) => commands::run_te_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("etpa: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

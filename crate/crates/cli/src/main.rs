//! Command-line front end: parse flags, dispatch to the library, emit
//! CSV or JSON artifacts.

mod args;
mod commands;
mod error;
mod output;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Steady(a) => commands::steady(a),
        Command::Scan(a) => commands::scan(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Trajectory(a) => commands::trajectory(a),
        Command::Thermal(a) => commands::thermal(a),
        Command::Trapped(a) => commands::trapped(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

//! `drsplit` — command-line front end for the Douglas–Rachford splitting
//! toolkit: closed-form rate tables, product-space composite solves,
//! step-length sweeps, and the identity verification suite.
//!
//! Exit codes: 0 success, 1 usage/parameter error, 2 I/O error,
//! 3 non-convergence (outputs still written), 4 verification failure.

mod commands;
mod errors;
mod manifest;
mod numfmt;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "drsplit",
    version,
    about = "Douglas–Rachford splitting rates, solves, and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate closed-form contraction rates over (beta, mu) grids.
    Rates(commands::rates::RatesArgs),
    /// Solve a composite problem min f(x) + g(Lx) by product-space
    /// Douglas–Rachford.
    Solve(commands::solve::SolveArgs),
    /// Minimize the skew contraction rate over the step length gamma.
    SweepGamma(commands::sweep::SweepArgs),
    /// Run the full identity/property verification suite.
    Verify(commands::verify::VerifyArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits with 2 on usage errors by default; this tool
            // reserves 2 for I/O and reports usage problems as 1.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => errors::EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Rates(args) => commands::rates::run(args),
        Command::Solve(args) => commands::solve::run(args),
        Command::SweepGamma(args) => commands::sweep::run(args),
        Command::Verify(args) => commands::verify::run(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

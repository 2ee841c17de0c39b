//! `blowup` — solve ODE Cauchy problems with blow-up solutions.
//!
//! Subcommands:
//! * `solve`   — integrate one problem under one transform, estimate the
//!   blow-up point and the singularity profile.
//! * `compare` — run two transforms of the same problem on an equal step
//!   budget and tabulate how fast each approaches `x*`.
//! * `sweep`   — integrate at several step sizes and report the empirical
//!   convergence order against the recorded exact solution.

mod compare;
mod config;
mod output;
mod solve;
mod sweep;

use clap::{Parser, Subcommand};

const EXIT_CODES_HELP: &str = "Exit codes:
  0  success
  1  invalid configuration
  2  expression parse error
  3  singular transform or evaluation failure during integration
  4  blow-up estimation or power-law fit failure
  5  I/O failure";

#[derive(Parser)]
#[command(
    name = "blowup",
    version,
    about = "Numerical solution of blow-up Cauchy problems via desingularizing transformations",
    after_help = EXIT_CODES_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a problem, estimate x* and fit y ~ A |x*-x|^-beta.
    Solve(solve::SolveArgs),
    /// Integrate two transforms of one problem on the same step budget.
    Compare(compare::CompareArgs),
    /// Convergence study over a list of step sizes.
    Sweep(sweep::SweepArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve::run(&args),
        Command::Compare(args) => compare::run(&args),
        Command::Sweep(args) => sweep::run(&args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

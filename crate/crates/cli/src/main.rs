//! `fraktur` command-line runner.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fraktur", version, about = "Space-time phase-field fracture solver and optimality checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone, Debug)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Random seed; overrides `output.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the forward problem and certify its KKT residuals.
    Forward(Common),
    /// Finite-difference checks of the energy derivatives and of a′.
    Check(Common),
    /// Tables showing that first- and second-order sufficiency fail.
    Counterexamples(Common),
    /// Solve the tracking control problem.
    Control(Common),
    /// Inf-sup probe of the upper-level regularity condition.
    Probe(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args, run): (&str, &Common, commands::Runner) = match &cli.cmd {
        Cmd::Forward(a) => ("forward", a, commands::forward),
        Cmd::Check(a) => ("check", a, commands::check),
        Cmd::Counterexamples(a) => ("counterexamples", a, commands::counterexamples),
        Cmd::Control(a) => ("control", a, commands::control),
        Cmd::Probe(a) => ("probe", a, commands::probe),
    };
    ExitCode::from(commands::run(name, args, run))
}

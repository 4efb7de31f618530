//! `plt`: two-qubit entanglement analysis from the command line.
//!
//! Exit codes: 0 separable, 1 entangled, 2 not a state, 3 parse or usage
//! error, 4 internal check failure.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use plt_core::Status;

pub const EXIT_SEPARABLE: u8 = 0;
pub const EXIT_ENTANGLED: u8 = 1;
pub const EXIT_NOT_A_STATE: u8 = 2;
pub const EXIT_USAGE: u8 = 3;
pub const EXIT_CHECK: u8 = 4;

pub fn exit_for(status: Status) -> u8 {
    match status {
        Status::Separable => EXIT_SEPARABLE,
        Status::Entangled => EXIT_ENTANGLED,
        Status::NotAState => EXIT_NOT_A_STATE,
    }
}

#[derive(Parser)]
#[command(name = "plt", version, about = "Two-qubit entanglement via Lorentzian singular values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for a density matrix file (.json or .csv).
    Analyze(commands::AnalyzeArgs),
    /// Separable decomposition, or a refusal with the margin.
    Decompose(commands::DecomposeArgs),
    /// Compare the verdict with the PPT criterion on random states.
    Crosscheck(commands::CrosscheckArgs),
    /// Classify a grid over μ-space with μ₀ = 1; CSV of mu1,mu2,mu3,class.
    ScanRegion(commands::ScanArgs),
    /// Write a named or random state as a density matrix file.
    Sample(commands::SampleArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Decompose(a) => commands::decompose(&a),
        Command::Crosscheck(a) => commands::crosscheck(&a),
        Command::ScanRegion(a) => commands::scan_region(&a),
        Command::Sample(a) => commands::sample(&a),
    };
    ExitCode::from(code)
}

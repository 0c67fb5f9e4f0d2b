//! `qspace`: command-line front end.
//!
//! Exit codes: 0 on success, 1 when a check command finds a residual above
//! tolerance, 2 on any input or validation error.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qspace",
    version,
    about = "Occupation-number Fock spaces from the command line"
)]
pub struct Cli {
    /// Seed for every sampled input.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Tolerance override for check commands (also read from QSPACE_TOL).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Worker threads for parallel loops (outputs do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Sym,
    Asym,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatsArg {
    Boson,
    Fermion,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Symmetric or antisymmetric product of two state documents.
    Product {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Apply an operator document to a state document.
    Apply {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Check the (anti)commutation relations on a truncated basis.
    CcrCheck {
        #[arg(long, value_enum)]
        stats: StatsArg,
        #[arg(long)]
        modes: usize,
        /// Particle cap; defaults to the mode count for fermions.
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Eigenvalues of a Hamiltonian on a sector or capped basis.
    #[command(group(ArgGroup::new("basis").required(true).args(["sector", "nmax"])))]
    Spectrum {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        sector: Option<u32>,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Time-evolve a state, printing norm, ⟨N⟩ and occupancies as CSV.
    Evolve {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long = "t", allow_negative_numbers = true)]
        time: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Compare occupation-space results with the labeled-tensor oracle.
    OracleCompare {
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        particles: usize,
        #[arg(long, value_enum)]
        stats: StatsArg,
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
    },
    /// Run the acceptance criteria.
    Selfcheck {
        /// Comma-separated criterion keys or prefixes, e.g. `ccr,oracle`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("qspace: {w}");
            }
            print!("{}", outcome.stdout);
            ExitCode::from(if outcome.check_failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("qspace: error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

//! `cstar-iso`: build, decompose, verify, fuzz and classify isometries of
//! finite-dimensional C*-algebras over JSON files.
//!
//! Exit codes: 0 success, 1 malformed input, 2 a check or decomposition
//! failed.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "cstar-iso",
    version,
    about = "Isometries between invertible groups of finite-dimensional C*-algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Tolerance for structural checks
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Number of random trials for sampled checks
    #[arg(long, global = true, default_value_t = 200)]
    trials: usize,
    /// Seed for all randomness
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path ("-" for stdout)
    #[arg(long, global = true, default_value = "-")]
    out: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read a certificate, write the matrix of its isometry
    Build {
        #[arg(long)]
        cert: String,
    },
    /// Read a map, write its certificate or a failure record
    Decompose {
        #[arg(long)]
        map: String,
    },
    /// Run identity checks on a map and print the max residual per check
    Verify {
        #[arg(long)]
        map: String,
        /// Comma-separated subset of triple,star,square,symmetry,metric
        #[arg(long, value_delimiter = ',', default_value = "triple,star,square,symmetry,metric")]
        checks: Vec<String>,
    },
    /// Roundtrip and rejection fuzzing on random certificates
    Fuzz {
        /// Block dimensions, e.g. 2,2
        #[arg(long, value_delimiter = ',')]
        signature: Vec<usize>,
    },
    /// Classify an isometry of a single matrix block into one of four forms
    Classify {
        #[arg(long)]
        map: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::run(cli) as u8)
}

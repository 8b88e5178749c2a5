use std::io::{stderr, stdout};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mgp_cli::commands::{
    cmd_density, cmd_report, cmd_simulate, cmd_validate, DensityOpts, ReportOpts, SimulateOpts,
    ValidateOpts,
};
use mgp_cli::{parse_float, CliError};

/// Multivariate generalized Pareto mixture models: validation, exact
/// simulation, density evaluation and statistical reports.
#[derive(Parser)]
#[command(name = "mgp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model file and print its derived quantities.
    Validate {
        /// Model file (TOML).
        model: PathBuf,
        /// Print the canonical model document instead of the summary.
        #[arg(long)]
        echo: bool,
        /// Evaluate the stdf at a point "x1,...,xd" (repeatable).
        #[arg(long = "stdf-at", value_name = "x1,...,xd")]
        stdf_at: Vec<String>,
        /// MVN CDF tolerance override.
        #[arg(long = "mvn-tol")]
        mvn_tol: Option<f64>,
    },
    /// Draw samples and write them as CSV.
    Simulate {
        model: PathBuf,
        /// Number of samples.
        #[arg(short = 'n', long = "samples")]
        n: u64,
        /// RNG seed; falls back to $MGP_SEED, then 0.
        #[arg(long, env = "MGP_SEED", default_value_t = 0)]
        seed: u64,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Apply z = s(exp(y/s) - 1) with this scale; off-support
        /// coordinates map to -s.
        #[arg(long, value_name = "scale")]
        transform: Option<f64>,
        /// Worker threads; output does not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Proposal budget per sample.
        #[arg(long = "max-rejections", default_value_t = 1_000_000)]
        max_rejections: u64,
        #[arg(long = "mvn-tol")]
        mvn_tol: Option<f64>,
    },
    /// Evaluate log-densities at points read from CSV.
    Density {
        model: PathBuf,
        /// Points CSV using the same "-inf" convention as simulate output.
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also run the quadrature oracle and report the discrepancy.
        #[arg(long)]
        oracle: bool,
        #[arg(long = "mvn-tol")]
        mvn_tol: Option<f64>,
    },
    /// Simulate a batch and print empirical-vs-true face probabilities
    /// plus distributional checks; exits nonzero if any check fails.
    Report {
        model: PathBuf,
        #[arg(short = 'n', long = "samples")]
        n: u64,
        #[arg(long, env = "MGP_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long = "mvn-tol")]
        mvn_tol: Option<f64>,
    },
}

fn parse_point_list(raw: &[String]) -> Result<Vec<Vec<f64>>, CliError> {
    raw.iter()
        .map(|s| s.split(',').map(parse_float).collect())
        .collect()
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let mut out = stdout().lock();
    let mut err = stderr().lock();
    match cli.command {
        Command::Validate { model, echo, stdf_at, mvn_tol } => {
            let opts = ValidateOpts { echo, stdf_at: parse_point_list(&stdf_at)?, mvn_tol };
            cmd_validate(&model, &opts, &mut out, &mut err)
        }
        Command::Simulate { model, n, seed, out: out_path, transform, workers, max_rejections, mvn_tol } => {
            let opts = SimulateOpts {
                n,
                seed,
                out: out_path,
                transform,
                workers,
                max_rejections,
                mvn_tol,
            };
            cmd_simulate(&model, &opts, &mut out, &mut err)
        }
        Command::Density { model, points, out: out_path, oracle, mvn_tol } => {
            let opts = DensityOpts { points, out: out_path, oracle, mvn_tol };
            cmd_density(&model, &opts, &mut out, &mut err)
        }
        Command::Report { model, n, seed, workers, mvn_tol } => {
            let opts = ReportOpts { n, seed, workers, mvn_tol };
            cmd_report(&model, &opts, &mut out, &mut err)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

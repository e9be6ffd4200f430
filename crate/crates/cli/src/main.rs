use std::path::PathBuf;
use std::process::ExitCode;

use bdie::runner::{run, RunConfig, Suite};
use bdie::Error;
use clap::Parser;

/// Solve the mixed boundary value problem on the ball through its
/// boundary-domain integral equations and run the verification suites.
#[derive(Debug, Parser)]
#[command(name = "bdie", version)]
struct Args {
    /// JSON run configuration; defaults are used for every missing field.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Suite to run (solve, identities, convergence, spectrum); repeatable,
    /// replaces the suites listed in the config.
    #[arg(long = "suite", value_parser = parse_suite)]
    suites: Vec<Suite>,

    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for the random probes, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = match &args.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    if !args.suites.is_empty() {
        config.suites = args.suites;
    }
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }

    let summary = match run(&config) {
        Ok(s) => s,
        Err(e @ (Error::Config(_) | Error::UnknownCase(_) | Error::UnknownCoefficient(_) | Error::InvalidCoefficient(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for c in &summary.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status} {}/{} value={:.3e} tolerance={:.1e}", c.suite, c.name, c.value, c.tolerance);
    }
    println!("reports written to {}", config.output_dir.display());
    if summary.passed {
        ExitCode::SUCCESS
    } else {
        for name in &summary.failed {
            eprintln!("failed criterion: {name}");
        }
        ExitCode::from(1)
    }
}

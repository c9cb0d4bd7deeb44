use std::path::PathBuf;
use std::process::ExitCode;

use biquat::harness::{self, RunOptions, SuiteFilter};
use clap::Parser;

/// Run a verification scenario and write its report.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Args {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suite group to run: t1, t2, t3, proof, neg or all.
    #[arg(long, default_value = "all")]
    suite: SuiteFilter,
    /// Override the theorem tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the refinement schedule, e.g. 64,128,256.
    #[arg(long, value_delimiter = ',')]
    refinements: Option<Vec<usize>>,
    /// Override the seed for random directions.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { harness::EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let opts = RunOptions { suite: args.suite, tol: args.tol, refinements: args.refinements, seed: args.seed };
    let code = harness::run_all(&args.scenario, args.out.as_deref(), &opts);
    ExitCode::from(code as u8)
}

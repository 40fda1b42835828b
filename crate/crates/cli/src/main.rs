use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stl_core::experiments::{self, Command, ExperimentConfig};

/// Seeded verification runs for nuclear operators and their spectra.
#[derive(Parser, Debug)]
#[command(name = "stl", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Nuclear trace against the eigenvalue sum on random representations.
    TraceCheck(Opts),
    /// Product, Newton and exponential-series determinants on a z-grid (CSV plus JSON summary).
    DetCompare(Opts),
    /// Spectral quasinorm over representation quasinorm for n = 16..1024.
    WeylScan(Opts),
    /// Lipschitz quotients of det(1 - u) on the r0-ball.
    Continuity(Opts),
    /// Factorization through l_p: diagram, trace of S and AB/BA spectra.
    FactorCheck(Opts),
}

#[derive(Args, Debug)]
struct Opts {
    /// Master seed; trial i uses a seed derived from (seed, i).
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Pass threshold; the default depends on the subcommand.
    #[arg(long)]
    tol: Option<f64>,
    /// Ball radius for `continuity`.
    #[arg(long)]
    r0: Option<f64>,
    /// Report path; det-compare writes the CSV here and the report to <PATH>.summary.json.
    /// Without it the report goes to stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Allow exponents off 1/r = 1/p + 1/2; the report is marked exploratory.
    #[arg(long)]
    unsafe_exponents: bool,
}

impl Cmd {
    fn into_config(self) -> ExperimentConfig {
        let (command, o) = match self {
            Cmd::TraceCheck(o) => (Command::TraceCheck, o),
            Cmd::DetCompare(o) => (Command::DetCompare, o),
            Cmd::WeylScan(o) => (Command::WeylScan, o),
            Cmd::Continuity(o) => (Command::Continuity, o),
            Cmd::FactorCheck(o) => (Command::FactorCheck, o),
        };
        let d = ExperimentConfig::new(command, o.seed);
        ExperimentConfig {
            dim: o.dim.unwrap_or(d.dim),
            rank: o.rank.unwrap_or(d.rank),
            trials: o.trials.unwrap_or(d.trials),
            r: o.r.unwrap_or(d.r),
            s: o.s.unwrap_or(d.s),
            p: o.p.unwrap_or(d.p),
            tol: o.tol.unwrap_or(d.tol),
            r0: o.r0.unwrap_or(d.r0),
            unsafe_exponents: o.unsafe_exponents,
            out: o.out,
            ..d
        }
    }
}

fn main() -> ExitCode {
    let cfg = Cli::parse().command.into_config();
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let output = match experiments::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = &output.report;
    match &cfg.out {
        Some(path) => match output.write(path) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => print!("{}", report.to_json()),
    }
    let failures = &report.summary.failures;
    eprintln!(
        "{}: {} ({} trials, {} failed){}",
        cfg.command,
        if report.pass() { "PASS" } else { "FAIL" },
        report.results.len(),
        failures.len(),
        if report.exploratory { ", exploratory" } else { "" }
    );
    if report.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

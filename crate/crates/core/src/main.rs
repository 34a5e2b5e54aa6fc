use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nkverify::humfit::CubicTensor;
use nkverify::lagrangian::{builtin_lagrangians, example_by_name, Immersion, Manifest};
use nkverify::report::VerificationReport;
use nkverify::suites::{
    fit_report, lagrangian_suite, proof_suite, structure_suite, ProofMode, SuiteOptions, DEFAULT_GRID,
    DEFAULT_G_SAMPLES, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TRIALS,
};

/// Verification harness for the homogeneous nearly Kähler S³×S³.
#[derive(Parser)]
#[command(name = "nkverify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Base seed; per-sample seeds are derived by counter.
    #[arg(long, global = true, env = "NKVERIFY_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Replace every numeric tolerance of the suite.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall time per check (makes reports non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Numeric,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Identities of g, J, P and skewness of G.
    Structure {
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Samples for the finite-difference G checks.
        #[arg(long, default_value_t = DEFAULT_G_SAMPLES)]
        g_samples: usize,
    },
    /// Analyze built-in or manifest-defined immersions on a parameter grid.
    Lagrangian {
        /// Built-in example name; repeatable. Defaults to every Lagrangian built-in.
        #[arg(long, conflicts_with = "manifest")]
        example: Vec<String>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Exact and numeric checks of the Codazzi case analysis.
    Proof {
        #[arg(long, default_value_t = DEFAULT_TRIALS as u64, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Mode::All)]
        mode: Mode,
    },
    /// Fit a cubic tensor file to the H-umbilical pattern.
    Fit { input: PathBuf },
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("nkverify: {msg}");
    ExitCode::from(2)
}

fn immersions(example: &[String], manifest: &Option<PathBuf>) -> nkverify::Result<Vec<Immersion>> {
    if let Some(path) = manifest {
        return Ok(vec![Manifest::load(path)?.build()?]);
    }
    if example.is_empty() {
        return Ok(builtin_lagrangians());
    }
    example.iter().map(|n| example_by_name(n)).collect()
}

fn run(cli: Cli) -> ExitCode {
    let c = &cli.common;
    if let Some(t) = c.tol {
        if !(t.is_finite() && t >= 0.0) {
            return usage(format!("--tol must be a finite non-negative number, got {t}"));
        }
    }
    let opts = SuiteOptions { seed: c.seed, tol: c.tol, timings: c.timings };
    let report: VerificationReport = match &cli.command {
        Command::Structure { samples, g_samples } => structure_suite(*samples, *g_samples, &opts),
        Command::Lagrangian { example, manifest, grid } => match immersions(example, manifest) {
            Ok(imms) => lagrangian_suite(&imms, *grid, &opts),
            Err(e) => return usage(e),
        },
        Command::Proof { trials, mode } => {
            let mode = match mode {
                Mode::Exact => ProofMode::Exact,
                Mode::Numeric => ProofMode::Numeric,
                Mode::All => ProofMode::All,
            };
            proof_suite(*trials as usize, mode, &opts)
        }
        Command::Fit { input } => match CubicTensor::load(input) {
            Ok(h) => fit_report(&h, &opts),
            Err(e) => return usage(format!("{}: {e}", input.display())),
        },
    };
    let text = match c.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &c.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                return usage(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}

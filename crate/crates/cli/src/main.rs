//! Batch driver for the corner-domain verification suite.
//!
//! Every subcommand runs one verification, writes CSV/SVG artifacts into
//! the output directory and prints a one-line verdict. Exit codes: 0 all
//! verdicts pass, 1 usage or configuration error, 2 some verdict failed,
//! 3 some verdict is inconclusive.

mod config;
mod domains;
mod geometry;
mod map;
mod oracle;
mod spectral;
mod suite;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cornerhodge::report::Verdict;

use config::{CliError, Ctx, FileConfig};

#[derive(Parser)]
#[command(
    name = "cornerhodge",
    version,
    about = "Verification runs for Hodge kernels, corner capacities and fold maps on polygonal domains",
    after_help = "Every long flag can also be set in the --config file as `name = value`; \
                  explicit flags win. CORNERHODGE_OUT_DIR overrides the output directory."
)]
struct Cli {
    /// Plain-text `key = value` defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for CSV/SVG artifacts.
    #[arg(long, global = true, env = "CORNERHODGE_OUT_DIR", value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Euler characteristics and the meshed V - E + F identity.
    Chi(geometry::ChiArgs),
    /// Interior angle report with the per-loop turning sums.
    Angles(geometry::AnglesArgs),
    /// Turning integrals of rounded corners against the defect pi - theta.
    Turning(geometry::TurningArgs),
    /// Cutoff-family capacity energies, L2 defects and the coupled schedule.
    Capacity(oracle::CapacityArgs),
    /// Integral identity |d w|^2 + |d* w|^2 = |grad w|^2 on test forms.
    Bochner(oracle::BochnerArgs),
    /// Low Hodge spectra with certified kernel dimensions.
    Spectrum(spectral::SpectrumArgs),
    /// Kernel-count index over an (h, rho) grid plus the all-maximal control.
    Index(spectral::IndexArgs),
    /// Smallest-eigenvalue refinement study for the minimal treatment.
    Gap(spectral::GapArgs),
    /// Pentagon-to-triangle fold map: validation and Lipschitz scaling.
    Cornermap(map::CornermapArgs),
    /// The full verification suite with acceptance-grade parameters.
    All,
}

fn run(cli: Cli) -> Result<Verdict, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| file.out_dir())
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir).map_err(|e| {
        CliError::Usage(format!("cannot create output directory {}: {e}", out_dir.display()))
    })?;
    let ctx = Ctx { file, out_dir };

    match &cli.command {
        Command::Chi(args) => geometry::chi(&ctx, args),
        Command::Angles(args) => geometry::angles(&ctx, args),
        Command::Turning(args) => geometry::turning(&ctx, args),
        Command::Capacity(args) => oracle::capacity(&ctx, args),
        Command::Bochner(args) => oracle::bochner(&ctx, args),
        Command::Spectrum(args) => spectral::spectrum(&ctx, args),
        Command::Index(args) => spectral::index(&ctx, args),
        Command::Gap(args) => spectral::gap(&ctx, args),
        Command::Cornermap(args) => map::cornermap(&ctx, args),
        Command::All => suite::all(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version print to stdout and succeed; anything else
            // is a usage error.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(2),
        Ok(Verdict::Inconclusive) => ExitCode::from(3),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

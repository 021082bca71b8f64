#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use convec_core::Error;

/// Spectral convection laboratory: invariant subspaces of the Bénard layer and
/// energy stability of annular convection.
#[derive(Debug, Parser)]
#[command(name = "convec-sym", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the layer equations from a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Split a state snapshot into its x-independent part and the fluctuation.
    Decompose(DecomposeArgs),
    /// Convection between horizontal coaxial cylinders.
    #[command(subcommand)]
    Annulus(AnnulusCommand),
    /// Planar-layer limit problems.
    #[command(subcommand)]
    Layer(LayerCommand),
    /// Base states (and optionally stability) over a list of Rayleigh numbers.
    Sweep(SweepArgs),
    /// Run the acceptance suite and print a summary table.
    Repro {
        /// Fewer random samples in the statistical checks.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// State snapshot (JSON).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pr: f64,
    #[arg(long, default_value_t = 1000.0)]
    ra: f64,
    /// Also tabulate the predicted mean profiles up to this time.
    #[arg(long, default_value_t = 0.0)]
    t_end: f64,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 33)]
    nz: usize,
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
}

#[derive(Debug, Args, Clone)]
struct GeometryArgs {
    #[arg(long, default_value_t = 1.0)]
    pr: f64,
    #[arg(long, default_value_t = 100.0)]
    ra: f64,
    /// Gap over inner radius.
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    /// Highest angular wavenumber.
    #[arg(long, alias = "modes", default_value_t = 8)]
    k: usize,
    /// Radial polynomial modes.
    #[arg(long, default_value_t = 24)]
    nr: usize,
}

#[derive(Debug, Subcommand)]
enum AnnulusCommand {
    /// Even-symmetric steady state.
    Steady {
        #[command(flatten)]
        geo: GeometryArgs,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
    },
    /// Energy-stability threshold of the steady state.
    Stability {
        #[command(flatten)]
        geo: GeometryArgs,
        /// Eigenvalues to report.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum LayerCommand {
    /// Rigid-wall layer eigenproblem, minimized over the horizontal wavenumber.
    Eig0 {
        #[arg(long, default_value_t = 24)]
        nr: usize,
        #[arg(long, default_value_t = 1.0)]
        kmin: f64,
        #[arg(long, default_value_t = 6.0)]
        kmax: f64,
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1.0)]
    pr: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long, alias = "modes", default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 24)]
    nr: usize,
    /// Comma-separated Rayleigh numbers.
    #[arg(long, value_delimiter = ',', required = true)]
    ra: Vec<f64>,
    /// Also compute the stability maximum at each point.
    #[arg(long)]
    stability: bool,
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
}

/// Exit status per error class.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidInput(_) | Error::Precondition(_) | Error::Json(_) => 2,
        Error::Divergence { .. } | Error::BlowUp { .. } => 3,
        Error::FailedBound(_) | Error::NormalizationMismatch { .. } => 4,
        Error::Resolution(_) | Error::InconsistentData(_) | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = commands::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    let result = match cli.command {
        Command::Simulate { config, output_dir } => commands::simulate(&config, output_dir),
        Command::Decompose(a) => commands::decompose(&a.input, a.pr, a.ra, a.t_end, a.samples, a.nz, &a.output_dir),
        Command::Annulus(AnnulusCommand::Steady { geo, output_dir }) => {
            commands::annulus_steady(geo.pr, geo.ra, geo.d, geo.k, geo.nr, &output_dir)
        }
        Command::Annulus(AnnulusCommand::Stability { geo, count, output_dir }) => {
            commands::annulus_stability(geo.pr, geo.ra, geo.d, geo.k, geo.nr, count, &output_dir)
        }
        Command::Layer(LayerCommand::Eig0 { nr, kmin, kmax, count, output_dir }) => {
            commands::layer_eig0(nr, kmin, kmax, count, &output_dir)
        }
        Command::Sweep(a) => commands::sweep(a.pr, a.d, a.k, a.nr, &a.ra, a.stability, &a.output_dir),
        Command::Repro { quick, output_dir } => commands::repro(quick, output_dir.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! `qdtree`: sweeps, fixed-point reports and Monte-Carlo checks for the
//! tree recursions in the `qdtree` crate.
//!
//! Exit codes: 0 on success, 2 on an invalid configuration, 3 when a
//! `--check` run finds a z-score above its threshold, 1 on I/O failure.

mod analytic;
mod grid;
mod mc;
mod table;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grid::Grid;
use qdtree::oracle::DEFAULT_SEED;
use table::{Format, Table};

#[derive(Debug, Parser)]
#[command(name = "qdtree", version, about = "Order-parameter recursions and stabilizer Monte Carlo on expanding trees")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trajectory pi(0..=t) of the single-copy recursion.
    Iterate(analytic::IterateArgs),
    /// Long-time phase and order parameters over a (p, f) grid.
    PhaseDiagram(analytic::PhaseArgs),
    /// Closed-form fixed points and their stability.
    FixedPoints(analytic::FixedPointArgs),
    /// Eavesdropper fixed points over an (r, f) grid, with scaling columns.
    Eavesdrop(analytic::EavesdropArgs),
    /// Annealed Renyi-2 weights and I2, or the threshold p_c(f).
    Replica(analytic::ReplicaArgs),
    /// Joint distribution of nested subsystems and its support pattern.
    Joint(analytic::JointArgs),
    /// Monte-Carlo estimate of pi against the recursion.
    Mc(mc::McArgs),
    /// Monte-Carlo mean of I(R, F) along nested access sets.
    McCurve(mc::CurveArgs),
    /// Shapes of single-realization I(R, F) curves.
    McShapes(mc::ShapeArgs),
    /// Monte-Carlo purities against the replica weights.
    McPurity(mc::PurityArgs),
    /// One sampled realization: gates, flags and stabilizer generators.
    Realize(mc::RealizeArgs),
    /// Runs every cross-module consistency check.
    Verify(verify::VerifyArgs),
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(io::Error),
}

impl From<qdtree::Error> for CliError {
    fn from(e: qdtree::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A finished table; `failure` is set when a `--check` threshold was exceeded.
pub struct Report {
    pub table: Table,
    pub failure: Option<String>,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Report { table, failure: None }
    }
}

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn grid_arg(s: &str) -> Result<Grid, String> {
    s.parse()
}

fn dispatch(command: Command, seed: u64) -> CliResult<Report> {
    match command {
        Command::Iterate(a) => analytic::trajectory(&a).map(Into::into),
        Command::PhaseDiagram(a) => analytic::phase_diagram(&a).map(Into::into),
        Command::FixedPoints(a) => analytic::fixed_points(&a).map(Into::into),
        Command::Eavesdrop(a) => analytic::eavesdrop(&a).map(Into::into),
        Command::Replica(a) => analytic::replica(&a).map(Into::into),
        Command::Joint(a) => analytic::joint(&a).map(Into::into),
        Command::Mc(a) => mc::mc(&a, seed),
        Command::McCurve(a) => mc::curve(&a, seed),
        Command::McShapes(a) => mc::shapes(&a, seed),
        Command::McPurity(a) => mc::purity(&a, seed),
        Command::Realize(_) => unreachable!("handled before dispatch"),
        Command::Verify(a) => verify::verify(&a, seed),
    }
}

fn run(cli: Cli) -> CliResult<Option<String>> {
    let Common { format, output, seed, threads } = cli.common;
    if let Some(n) = threads {
        if n == 0 {
            return Err(config_err("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config_err(e.to_string()))?;
    }
    let mut out: Box<dyn Write> = match &output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if let Command::Realize(a) = &cli.command {
        mc::realize(a, seed, format, &mut out)?;
        out.flush()?;
        return Ok(None);
    }
    let report = dispatch(cli.command, seed)?;
    report.table.write(format, &mut out)?;
    out.flush()?;
    Ok(report.failure)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("check failed: {failure}");
            ExitCode::from(3)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        // a closed downstream pipe (`| head`) is not a failure
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

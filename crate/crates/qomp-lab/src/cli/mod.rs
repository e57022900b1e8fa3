//! Command-line experiment harness.
//!
//! Every subcommand reads a JSON config. Commands with a single run write a
//! JSON record and a one-row CSV summary; `sweep` writes CSV only.

mod commands;
mod config;
mod table;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

pub use commands::Outcome;
pub use config::{
    BenchCommand, DictionaryKind, EstimateMuCommand, GenerateSpec, Instance, InstanceFile, InstanceSource, NoiseConfig,
    OmpCommand, OmpVariant, QompCommand, ReduceX3cCommand, Solver, SweepCommand, TomographyCommand, X3cGenerate,
};
pub use table::{write_rows, Row, HEADER};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "QOMP_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "qomp-lab", version, about = "Quantum and classical sparse recovery experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Omp,
    Qomp,
    Sweep,
    ReduceX3c,
    EstimateMu,
    Tomography,
    Bench,
}

#[derive(clap::Args, Debug, Clone)]
pub struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; the CSV summary of single runs goes next to it with a
    /// `.csv` extension. Defaults to stdout (JSON) and stderr (CSV).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Classical orthogonal matching pursuit.
    Omp(CommonArgs),
    /// Simulated quantum OMP, or support recovery when `eta` is set.
    Qomp(CommonArgs),
    /// Grid of generated instances, one CSV row per trial.
    Sweep(CommonArgs),
    /// Exact cover by 3-sets to sparse recovery.
    ReduceX3c(CommonArgs),
    /// Quantum estimate of the mutual incoherence.
    EstimateMu(CommonArgs),
    /// Support recovery followed by coefficient tomography.
    Tomography(CommonArgs),
    /// Query ledgers against analytic cost formulas.
    Bench(CommonArgs),
}

impl Command {
    fn parts(&self) -> (Kind, &CommonArgs) {
        match self {
            Command::Omp(a) => (Kind::Omp, a),
            Command::Qomp(a) => (Kind::Qomp, a),
            Command::Sweep(a) => (Kind::Sweep, a),
            Command::ReduceX3c(a) => (Kind::ReduceX3c, a),
            Command::EstimateMu(a) => (Kind::EstimateMu, a),
            Command::Tomography(a) => (Kind::Tomography, a),
            Command::Bench(a) => (Kind::Bench, a),
        }
    }
}

/// Runs one command without writing anything.
pub fn execute(kind: Kind, config: &Path, seed: Option<u64>) -> Result<Outcome> {
    match kind {
        Kind::Omp => commands::omp_cmd(config, seed),
        Kind::Qomp => commands::qomp_cmd(config, seed),
        Kind::Sweep => commands::sweep_cmd(config, seed),
        Kind::ReduceX3c => commands::reduce_x3c_cmd(config, seed),
        Kind::EstimateMu => commands::estimate_mu_cmd(config, seed),
        Kind::Tomography => commands::tomography_cmd(config, seed),
        Kind::Bench => commands::bench_cmd(config, seed),
    }
}

fn write_outputs(outcome: &Outcome, out: Option<&Path>) -> Result<()> {
    let mut csv = Vec::new();
    if outcome.json.is_none() || !outcome.rows.is_empty() {
        write_rows(&mut csv, &outcome.rows)?;
    }
    let write =
        |path: &Path, bytes: &[u8]| fs::write(path, bytes).with_context(|| format!("writing {}", path.display()));
    match (out, &outcome.json) {
        (Some(path), Some(json)) => {
            write(path, json.as_bytes())?;
            if !csv.is_empty() {
                write(&path.with_extension("csv"), &csv)?;
            }
        }
        (Some(path), None) => write(path, &csv)?,
        (None, Some(json)) => {
            std::io::stdout().write_all(json.as_bytes())?;
            std::io::stderr().write_all(&csv)?;
        }
        (None, None) => std::io::stdout().write_all(&csv)?,
    }
    Ok(())
}

fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok()
}

/// Parses arguments, runs the command and returns the process exit code:
/// 0 on success or convergence, 2 when a pursuit stops without converging,
/// 1 on errors.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (kind, common) = cli.command.parts();
    let result = crate::exec::with_threads(threads_from_env(), || {
        let outcome = execute(kind, &common.config, common.seed)?;
        write_outputs(&outcome, common.out.as_deref())?;
        Ok::<_, anyhow::Error>(outcome.exit)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn main() -> i32 {
    run_from(std::env::args_os())
}

//! Command-line front end: JSON config in, CSV/JSON artifacts out.
//!
//! Exit codes: `0` when every check passes, `1` when a check fails (the failure list is
//! printed to stderr as JSON), `2` for configuration or I/O errors.

pub mod bloch;
pub mod config;
pub mod flow;
pub mod haar_cmd;
pub mod output;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use output::{write_file, Provenance, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    BlochGrid,
    ProtocolReport,
    Haar,
    Flow,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::BlochGrid => "bloch-grid",
            Command::ProtocolReport => "protocol-report",
            Command::Haar => "haar",
            Command::Flow => "flow",
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Primary output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed given in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Energy-change landscape of a qubit unitary over the Bloch ball (CSV, plus a JSON summary).
    BlochGrid(RunArgs),
    /// Auxiliary-qubit drive report (JSON, plus a long-format CSV table).
    ProtocolReport(RunArgs),
    /// Exact and Monte Carlo Haar averages (JSON).
    Haar(RunArgs),
    /// Flow index of banded unitaries (JSON).
    Flow(RunArgs),
}

#[derive(Debug, Parser)]
#[command(
    name = "qbattery",
    version,
    about = "Quantum battery charging protocol toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

/// Companion artifact next to `out`: `run.csv` becomes `run.<suffix>`.
pub fn companion_path(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

/// Outcome of a completed run.
#[derive(Debug)]
pub struct Outcome {
    pub failures: Vec<String>,
    pub written: Vec<PathBuf>,
}

fn seed_of(cli: Option<u64>, cfg: Option<u64>) -> u64 {
    cli.or(cfg).unwrap_or(0)
}

pub fn execute(command: Command, args: &RunArgs) -> Result<Outcome> {
    let bytes = std::fs::read(&args.config)?;
    let name = command.name();
    let mut written = Vec::new();
    let mut emit = |path: PathBuf, contents: &str| -> Result<()> {
        write_file(&path, contents)?;
        written.push(path);
        Ok(())
    };
    let report: Report = match command {
        Command::BlochGrid => {
            let cfg: config::BlochGridConfig = config::parse(&bytes)?;
            let prov = Provenance::new(name, &bytes, seed_of(args.seed, cfg.seed));
            let out = bloch::run(&cfg, prov)?;
            emit(args.out.clone(), &out.csv)?;
            emit(
                companion_path(&args.out, "summary.json"),
                &out.report.to_json()?,
            )?;
            out.report
        }
        Command::ProtocolReport => {
            let cfg: config::ProtocolReportConfig = config::parse(&bytes)?;
            let prov = Provenance::new(name, &bytes, seed_of(args.seed, cfg.seed));
            let out = report::run(&cfg, prov)?;
            emit(args.out.clone(), &out.report.to_json()?)?;
            emit(companion_path(&args.out, "table.csv"), &out.csv)?;
            out.report
        }
        Command::Haar => {
            let cfg: config::HaarConfig = config::parse(&bytes)?;
            let prov = Provenance::new(name, &bytes, seed_of(args.seed, cfg.seed));
            let r = haar_cmd::run(&cfg, prov)?;
            emit(args.out.clone(), &r.to_json()?)?;
            r
        }
        Command::Flow => {
            let cfg: config::FlowConfig = config::parse(&bytes)?;
            let prov = Provenance::new(name, &bytes, seed_of(args.seed, cfg.seed));
            let r = flow::run(&cfg, prov)?;
            emit(args.out.clone(), &r.to_json()?)?;
            r
        }
    };
    Ok(Outcome {
        failures: report.failures(),
        written,
    })
}

/// Runs the parsed command line and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let (command, args) = match &cli.cmd {
        Cmd::BlochGrid(a) => (Command::BlochGrid, a),
        Cmd::ProtocolReport(a) => (Command::ProtocolReport, a),
        Cmd::Haar(a) => (Command::Haar, a),
        Cmd::Flow(a) => (Command::Flow, a),
    };
    match execute(command, args) {
        Ok(outcome) if outcome.failures.is_empty() => 0,
        Ok(outcome) => {
            eprintln!("{}", serde_json::json!({ "failures": outcome.failures }));
            1
        }
        Err(e) => {
            let kind = match e {
                Error::Config(_) | Error::Json(_) => "config",
                Error::Io(_) => "io",
                _ => "internal",
            };
            eprintln!(
                "{}",
                serde_json::json!({ "error": kind, "message": e.to_string() })
            );
            2
        }
    }
}

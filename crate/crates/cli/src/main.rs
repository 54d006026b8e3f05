mod commands;
mod error;
mod problem;
mod report;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::commands::Command;
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "dglift",
    version,
    about = "Lift DG modules along Koszul extensions over truncated rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Subcommands,
}

#[derive(Subcommand)]
enum Subcommands {
    /// Validate the module and print its shape
    Check(Options),
    /// Homology of the underlying complex of R-modules
    Homology(Options),
    /// Decide whether Ext^i(module, other) vanishes (other defaults to module)
    Ext(Options),
    /// Lift a module over K^R(t) ⊗ A to A
    Lift(Options),
    /// Quasi-lift a module over K^R(t_1, ..., t_n) to R, one variable at a time
    LiftIterated(Options),
    /// Turn an isomorphism of base changes into an isomorphism of lifts
    Unique(Options),
    /// Check whether the homothety A -> Hom(M, M) is a quasi-isomorphism
    Semidualizing(Options),
    /// Semi-free resolution by killing cycles
    Resolve(Options),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Options {
    /// Problem file; read from stdin when absent or "-"
    pub problem: Option<PathBuf>,
    /// Coefficient ring, e.g. "F2[t]/(t^2)", "Q[t]/(t^3)", "Z/3^4", or "F5" with --precision
    #[arg(long)]
    pub ring: Option<String>,
    /// Overrides the ring precision
    #[arg(long)]
    pub precision: Option<usize>,
    /// Degree window LO..HI
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<(i64, i64)>,
    /// Write the machine-readable report here
    #[arg(long, value_name = "OUT")]
    pub json: Option<PathBuf>,
    /// Write the lifting transcript (JSON lines) here
    #[arg(long, value_name = "OUT")]
    pub transcript: Option<PathBuf>,
    /// Ext degree
    #[arg(long, allow_hyphen_values = true)]
    pub degree: Option<i64>,
    /// Seed for perturbed homotopy choices
    #[arg(long)]
    pub seed: Option<u64>,
    /// Disable data-parallel evaluation
    #[arg(long)]
    pub sequential: bool,
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
        }
    }
    Ok(text)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn execute(command: Command, opts: &Options) -> Result<u8, CliError> {
    let problem = problem::load(&read_input(opts.problem.as_deref())?)?;
    let spec = problem::ring_spec(&problem, opts)?;
    let report = commands::dispatch(command, spec, &problem, opts)?;
    for line in &report.lines {
        println!("{line}");
    }
    if let Some(path) = &opts.json {
        write_file(path, &report.json_text())?;
    }
    if let (Some(path), Some(t)) = (&opts.transcript, &report.transcript) {
        write_file(path, t)?;
    }
    Ok(report.exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match cli.command {
        Subcommands::Check(o) => (Command::Check, o),
        Subcommands::Homology(o) => (Command::Homology, o),
        Subcommands::Ext(o) => (Command::Ext, o),
        Subcommands::Lift(o) => (Command::Lift, o),
        Subcommands::LiftIterated(o) => (Command::LiftIterated, o),
        Subcommands::Unique(o) => (Command::Unique, o),
        Subcommands::Semidualizing(o) => (Command::Semidualizing, o),
        Subcommands::Resolve(o) => (Command::Resolve, o),
    };
    match execute(command, &opts) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(path) = &opts.json {
                let body = json!({"command": command.name(), "status": "error", "error": e.to_string()});
                let _ = std::fs::write(path, serde_json::to_string_pretty(&body).expect("json") + "\n");
            }
            ExitCode::from(1)
        }
    }
}

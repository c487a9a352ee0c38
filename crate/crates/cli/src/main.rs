//! `lln`: run, verify and export Lévy-Leblond–Newton simulations from a JSON config.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lln_core::config::Config;

#[derive(Parser)]
#[command(name = "lln", version, about = "Lévy-Leblond–Newton workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// JSON run configuration.
    #[arg(short, long)]
    pub config: PathBuf,
    /// Output directory (overrides `outputs.dir`).
    #[arg(short, long, env = "LLN_OUTPUT_DIR")]
    pub output_dir: Option<PathBuf>,
    /// Worker threads (overrides `outputs.threads`).
    #[arg(long, env = "LLN_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check metric, Clifford, Christoffel, Ricci and Dirac identities for the configured potentials.
    VerifyGeometry(Common),
    /// Evolve the initial field; writes charges.csv, snapshots and a manifest.
    Evolve(Common),
    /// Imaginary-time ground state of the configured system.
    GroundState(Common),
    /// Recompute the charge record of field snapshots.
    Charges {
        #[command(flatten)]
        common: Common,
        /// Field snapshots (default: the config's initial field).
        snapshots: Vec<PathBuf>,
    },
    /// Covariance test of the evolution under `checks.element`.
    SymmetryCheck(Common),
}

/// Failures that map to exit code 1 (checks) or 2 (usage).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(String),
}

impl From<lln_core::Error> for Failure {
    fn from(e: lln_core::Error) -> Self {
        match e {
            lln_core::Error::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Run(format!("json: {e}"))
    }
}

pub struct Ctx {
    pub config: Config,
    pub out: PathBuf,
    pub config_path: PathBuf,
}

fn setup(c: &Common) -> Result<Ctx, Failure> {
    let config = Config::load(&c.config)?;
    let out = c.output_dir.clone().or_else(|| config.outputs.dir.clone()).unwrap_or_else(|| PathBuf::from("lln_out"));
    std::fs::create_dir_all(&out)?;
    let threads = c.threads.unwrap_or(config.outputs.threads);
    if threads > 0 {
        // only the first call in a process can size the global pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(Ctx { config, out, config_path: c.config.clone() })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyGeometry(c) => setup(c).and_then(|ctx| commands::verify_geometry(&ctx)),
        Command::Evolve(c) => setup(c).and_then(|ctx| commands::evolve(&ctx)),
        Command::GroundState(c) => setup(c).and_then(|ctx| commands::ground_state(&ctx)),
        Command::Charges { common, snapshots } => setup(common).and_then(|ctx| commands::charges(&ctx, snapshots)),
        Command::SymmetryCheck(c) => setup(c).and_then(|ctx| commands::symmetry_check(&ctx)),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
    }
}

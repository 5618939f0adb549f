//! Command-line harness: JSON-configured sweeps writing CSV, JSON and SVG.
//!
//! ```text
//! seca metrics|vqe|cut-verify|plot --config <path> [--out <dir>] [--seed <u64>] [--threads <n>]
//! ```
//!
//! Exit codes: 0 success, 2 config error, 3 numerical failure, 4 verification failure.

pub mod config;
pub mod cut_cmd;
pub mod error;
pub mod metrics_cmd;
pub mod output;
pub mod plot;
pub mod svg;
pub mod vqe_cmd;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

pub use error::{CliError, CliResult};

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "SECA_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Metrics,
    Vqe,
    CutVerify,
    Plot,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "seca", version, about = "Bipartite ansatz workbench: metrics, VQE, gate-cut verification, plots")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; falls back to the environment variable, then to the core count.
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
}

fn dispatch(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let out = &cli.out;
    let prepare_out = || -> CliResult<()> {
        std::fs::create_dir_all(out).map_err(|e| CliError::config(format!("cannot create {}: {e}", out.display())))
    };
    match cli.command {
        Command::Metrics => {
            let mut cfg: metrics_cmd::MetricsConfig = config::load(&cli.config)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            prepare_out()?;
            metrics_cmd::run(&cfg, out)
        }
        Command::Vqe => {
            let mut cfg: vqe_cmd::VqeConfig = config::load(&cli.config)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            prepare_out()?;
            vqe_cmd::run(&cfg, out)
        }
        Command::CutVerify => {
            let mut cfg: cut_cmd::CutConfig = config::load(&cli.config)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            prepare_out()?;
            cut_cmd::run(&cfg, out)
        }
        Command::Plot => {
            let cfg: plot::PlotConfig = config::load(&cli.config)?;
            prepare_out()?;
            let dir = cli.config.parent().unwrap_or(Path::new("."));
            plot::run(&cfg, dir, out)
        }
    }
}

/// Runs one command inside a dedicated thread pool and returns the files written.
pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("thread count must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

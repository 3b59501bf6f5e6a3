//! `gsd-bench`: ingestion, configuration and report emission around the
//! `gsd-core` analyses.

pub mod commands;
pub mod config;
pub mod dot;
pub mod ingest;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use thiserror::Error;

pub use commands::{run, Outcome};
pub use config::RunConfig;
pub use ingest::{ingest_evaluations, read_evaluations, write_evaluations, IngestError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("cannot parse {path}: {source}")]
    Json { path: String, source: serde_json::Error },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Ingest(#[from] IngestError),

    #[error(transparent)]
    Core(#[from] gsd_core::Error),
}

impl CliError {
    /// 2 input error, 3 infeasible or inconsistent model, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        use gsd_core::Error as E;
        match self {
            CliError::Core(E::InconsistentAtDelta(_) | E::EmptyCredalSet)
            | CliError::Ingest(IngestError::Core(E::InconsistentAtDelta(_) | E::EmptyCredalSet)) => 3,
            CliError::Core(E::NumericFailure(_)) | CliError::Ingest(IngestError::Core(E::NumericFailure(_))) => 4,
            _ => 2,
        }
    }
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Parser)]
#[command(name = "gsd-bench", version, about = "Compare subjects on mixed-scale metrics by generalized stochastic dominance")]
pub struct Cli {
    /// Worker threads for replicate and margin computations (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Delta-consistency of a preference system.
    Consistency {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
    /// Pairwise GSD verdicts and choice sets for a family of acts.
    Compare {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        credal: PathBuf,
        #[arg(long)]
        acts: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
    /// Permutation test of one subject against another, per delta.
    Test {
        #[arg(long)]
        evals: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subjects: Option<Vec<String>>,
    },
    /// Contamination-robust test over a grid of contamination levels.
    RobustTest {
        #[arg(long)]
        evals: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subjects: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        zeta_grid: Option<Vec<f64>>,
    },
    /// Empirical GSD-front, Pareto front and optional membership test.
    Front {
        #[arg(long)]
        evals: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        candidate: Option<String>,
        #[arg(long, value_delimiter = ',', num_args = 0.., requires = "candidate")]
        opponents: Option<Vec<String>>,
        /// Also write the Hasse diagram of the empirical dominance as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

//! Library side of the `lowtrot` command: configuration, sweep
//! orchestration and report emission.

pub mod analyze;
pub mod config;
pub mod cost;
pub mod leakage;
pub mod report;

use std::path::PathBuf;

use thiserror::Error;

pub use analyze::{run_analyze, AnalysisRun, Failure};
pub use config::{load_config, parse_raw, validate, ExperimentConfig, Format};
pub use cost::{run_compare, run_cost, CompareRow, CostReport};
pub use leakage::{random_local_operator, run_leakage, LeakageRow};
pub use report::{emit_report, load_json_report, ReportRow};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "LOWTROT_WORKERS";

pub mod exit {
    pub const OK: i32 = 0;
    pub const VERDICT_FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const RUNTIME: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid config field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("cannot read {}: {message}", path.display())]
    Io { path: PathBuf, message: String },

    #[error("cannot write {}: {message}", path.display())]
    Output { path: PathBuf, message: String },

    #[error(transparent)]
    Runtime(#[from] trotter_lowenergy::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Io { .. } => exit::USAGE,
            CliError::Runtime(trotter_lowenergy::Error::DimensionTooLarge { .. }) => exit::USAGE,
            CliError::Output { .. } | CliError::Runtime(_) => exit::RUNTIME,
        }
    }
}

/// A rayon pool with `workers` threads, or rayon's default when `None`.
pub fn worker_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w.max(1));
    }
    b.build()
        .map_err(|e| CliError::Runtime(trotter_lowenergy::Error::InvalidParameter(e.to_string())))
}

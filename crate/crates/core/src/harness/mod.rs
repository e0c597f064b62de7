//! Experiment orchestration: continual and threshold runs, the λ sweep,
//! the four-technique comparison, and their on-disk formats.

mod compare;
mod config;
mod output;
mod run;
pub mod stats;
mod sweep;

use std::path::PathBuf;

use thiserror::Error;

use crate::environments::EnvError;
use crate::evolution::EvolutionError;
use crate::genome::GenomeError;
use crate::weight_protection::WpError;

pub use compare::{technique_comparison, Comparison, TechniqueSummary};
pub use config::{ConfigMap, RunConfig, TaskTable, Technique, DEFAULT_TASKS};
pub use output::{
    read_result, write_comparison, write_retention_csv, write_run, write_stats_csv, write_sweep,
};
pub use run::{
    run, run_continual, run_threshold_loop, GenerationStats, RetentionRecord, RunResult,
    ThresholdOutcome,
};
pub use sweep::{lambda_sweep, SweepCell, SweepRow, SweepTable, DEFAULT_GRID};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Wp(#[from] WpError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Genome(#[from] GenomeError),
}

impl HarnessError {
    pub(crate) fn with_key(self, key: &str) -> Self {
        match self {
            HarnessError::Config { message, .. } => HarnessError::Config {
                key: key.into(),
                message,
            },
            other => other,
        }
    }
}

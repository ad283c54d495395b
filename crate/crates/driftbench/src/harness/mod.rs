//! Experiment orchestration: configuration, seeding, the replication runner,
//! and result emission.
//!
//! A configured experiment expands into (grid point, replication) work units.
//! Each unit derives its own random streams from the base seed, so results
//! are identical whether units run sequentially or across a thread pool, and
//! two runs with the same configuration produce byte-identical output files.

use std::fmt;
use std::path::PathBuf;

use crate::dyadic::DyadicError;
use crate::envs::EnvError;
use crate::ingest::IngestError;
use crate::metrics::MetricsError;
use crate::policies::PolicyError;

mod config;
mod emit;
mod runner;
mod seeds;

pub use config::{
    load_file_config, DatasetSpec, ExperimentConfig, ExperimentKind, FileConfig, OutputFormat,
    ReplayParams,
};
pub use emit::{emit, emit_to_path, write_series, write_series_to_path, ResultRow};
pub use runner::{run_experiment, run_policy, run_replay, ReplayOutput};
pub use seeds::{policy_seed, stream_rng, ENV_STREAM};

#[derive(Debug)]
pub enum HarnessError {
    Config(String),
    Env(EnvError),
    Policy(PolicyError),
    Metrics(MetricsError),
    Ingest(IngestError),
    Dyadic(DyadicError),
    Io { path: PathBuf, message: String },
    Serialize(String),
    /// Nothing to emit; an experiment always yields at least one row.
    NoRows,
    /// A replay or sweep produced an empty reward stream.
    NoRewards,
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(msg) => write!(f, "bad configuration: {msg}"),
            HarnessError::Env(e) => write!(f, "environment: {e}"),
            HarnessError::Policy(e) => write!(f, "policy: {e}"),
            HarnessError::Metrics(e) => write!(f, "metrics: {e}"),
            HarnessError::Ingest(e) => write!(f, "ingest: {e}"),
            HarnessError::Dyadic(e) => write!(f, "interval system: {e}"),
            HarnessError::Io { path, message } => {
                write!(f, "io on {}: {message}", path.display())
            }
            HarnessError::Serialize(msg) => write!(f, "serialization: {msg}"),
            HarnessError::NoRows => write!(f, "no result rows to emit"),
            HarnessError::NoRewards => write!(f, "empty reward stream"),
        }
    }
}

impl std::error::Error for HarnessError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            HarnessError::Env(e) => Some(e),
            HarnessError::Policy(e) => Some(e),
            HarnessError::Metrics(e) => Some(e),
            HarnessError::Ingest(e) => Some(e),
            HarnessError::Dyadic(e) => Some(e),
            _ => None,
        }
    }
}

impl From<EnvError> for HarnessError {
    fn from(e: EnvError) -> Self {
        HarnessError::Env(e)
    }
}

impl From<PolicyError> for HarnessError {
    fn from(e: PolicyError) -> Self {
        HarnessError::Policy(e)
    }
}

impl From<MetricsError> for HarnessError {
    fn from(e: MetricsError) -> Self {
        HarnessError::Metrics(e)
    }
}

impl From<IngestError> for HarnessError {
    fn from(e: IngestError) -> Self {
        HarnessError::Ingest(e)
    }
}

impl From<DyadicError> for HarnessError {
    fn from(e: DyadicError) -> Self {
        HarnessError::Dyadic(e)
    }
}

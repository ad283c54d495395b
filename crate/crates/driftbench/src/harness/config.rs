//! Experiment configuration: the resolved in-memory form plus the optional
//! TOML file that mirrors the command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::envs::SweepKind;
use crate::policies::{AnhMode, PolicyKind};

use super::HarnessError;

// ---------------------------------------------------------------------------
// Experiment kinds
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Gap,
    Shifts,
    SegLen,
    Experts,
    ScaledN,
    ScaledDelta,
    ScaledBoth,
    Replay,
    Bench,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Gap => "gap",
            ExperimentKind::Shifts => "shifts",
            ExperimentKind::SegLen => "seglen",
            ExperimentKind::Experts => "experts",
            ExperimentKind::ScaledN => "scaled-n",
            ExperimentKind::ScaledDelta => "scaled-delta",
            ExperimentKind::ScaledBoth => "scaled-both",
            ExperimentKind::Replay => "replay",
            ExperimentKind::Bench => "bench",
        }
    }

    /// The synthetic sweep family behind this kind, if it is one.
    pub fn sweep_kind(self) -> Option<SweepKind> {
        match self {
            ExperimentKind::Gap => Some(SweepKind::Gap),
            ExperimentKind::Shifts => Some(SweepKind::Shifts),
            ExperimentKind::SegLen => Some(SweepKind::SegLen),
            ExperimentKind::Experts => Some(SweepKind::Experts),
            ExperimentKind::ScaledN => Some(SweepKind::ScaledN),
            ExperimentKind::ScaledDelta => Some(SweepKind::ScaledDelta),
            ExperimentKind::ScaledBoth => Some(SweepKind::ScaledBoth),
            ExperimentKind::Replay | ExperimentKind::Bench => None,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gap" => Ok(ExperimentKind::Gap),
            "shifts" => Ok(ExperimentKind::Shifts),
            "seglen" => Ok(ExperimentKind::SegLen),
            "experts" => Ok(ExperimentKind::Experts),
            "scaled-n" | "scaledn" => Ok(ExperimentKind::ScaledN),
            "scaled-delta" | "scaleddelta" => Ok(ExperimentKind::ScaledDelta),
            "scaled-both" | "scaledboth" => Ok(ExperimentKind::ScaledBoth),
            "replay" => Ok(ExperimentKind::Replay),
            "bench" => Ok(ExperimentKind::Bench),
            other => Err(format!("unknown experiment kind '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

// ---------------------------------------------------------------------------
// Replay datasets
// ---------------------------------------------------------------------------

/// Which series a replay run thresholds. The two named presets default to
/// the conventional file names under ./data; `square` needs no file at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetSpec {
    Pm25 { path: Option<PathBuf> },
    Power { path: Option<PathBuf> },
    SquareWave,
    Csv { path: PathBuf },
}

impl FromStr for DatasetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        match head.trim().to_ascii_lowercase().as_str() {
            "pm25" => Ok(DatasetSpec::Pm25 {
                path: tail.map(PathBuf::from),
            }),
            "power" => Ok(DatasetSpec::Power {
                path: tail.map(PathBuf::from),
            }),
            "square" => Ok(DatasetSpec::SquareWave),
            "csv" => match tail {
                Some(p) if !p.is_empty() => Ok(DatasetSpec::Csv {
                    path: PathBuf::from(p),
                }),
                _ => Err("csv dataset needs a path, as in csv:rows.csv".to_string()),
            },
            other => Err(format!(
                "unknown dataset '{other}' (expected pm25, power, square, or csv:PATH)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayParams {
    pub dataset: DatasetSpec,
    /// Overrides the dataset's default threshold.
    pub threshold: Option<f64>,
    /// Column name for csv datasets; the first column when omitted.
    pub column: Option<String>,
}

impl Default for ReplayParams {
    fn default() -> Self {
        ReplayParams {
            dataset: DatasetSpec::SquareWave,
            threshold: None,
            column: None,
        }
    }
}

// ---------------------------------------------------------------------------
// Resolved configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Policies to run, in output order.
    pub policies: Vec<PolicyKind>,
    pub replications: u32,
    /// Replication r seeds its streams from base_seed + r.
    pub base_seed: u64,
    pub anh_mode: AnhMode,
    /// Swept values; the kind's default grid when absent.
    pub grid: Option<Vec<f64>>,
    pub replay: ReplayParams,
    /// Worker threads for replication units; 0 means one per core.
    pub jobs: usize,
    /// Record wall-clock columns. Off by default so output files are
    /// byte-stable across runs.
    pub timings: bool,
    pub format: OutputFormat,
    /// Result file; stdout when absent.
    pub out: Option<PathBuf>,
    /// Cumulative reward-difference series file for replay runs.
    pub series_out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            policies: vec![PolicyKind::Ftl, PolicyKind::Ftbi, PolicyKind::Anh],
            replications: if kind == ExperimentKind::Replay { 1 } else { 20 },
            base_seed: 1,
            anh_mode: AnhMode::Sampled,
            grid: None,
            replay: ReplayParams::default(),
            jobs: 0,
            timings: false,
            format: OutputFormat::Csv,
            out: None,
            series_out: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.policies.is_empty() {
            return Err(HarnessError::Config("no policies selected".to_string()));
        }
        let mut seen = Vec::new();
        for p in &self.policies {
            if seen.contains(p) {
                return Err(HarnessError::Config(format!(
                    "policy '{p}' listed more than once"
                )));
            }
            seen.push(*p);
        }
        if self.replications == 0 {
            return Err(HarnessError::Config(
                "need at least one replication".to_string(),
            ));
        }
        if let Some(grid) = &self.grid {
            if grid.is_empty() {
                return Err(HarnessError::Config("empty sweep grid".to_string()));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// File configuration
// ---------------------------------------------------------------------------

/// TOML mirror of the command-line flags. Every key is optional; flags given
/// on the command line win over file values.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub policies: Option<Vec<String>>,
    pub replications: Option<u32>,
    pub seed: Option<u64>,
    pub anh_mode: Option<String>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub timings: Option<bool>,
    pub gaps: Option<Vec<f64>>,
    pub shifts: Option<Vec<u64>>,
    pub seglens: Option<Vec<u64>>,
    pub experts: Option<Vec<u64>>,
    pub horizons: Option<Vec<u64>>,
    pub dataset: Option<String>,
    pub threshold: Option<f64>,
    pub column: Option<String>,
    pub series_out: Option<PathBuf>,
}

pub fn load_file_config(path: &std::path::Path) -> Result<FileConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| HarnessError::Config(format!(
        "cannot parse {}: {e}",
        path.display()
    )))
}

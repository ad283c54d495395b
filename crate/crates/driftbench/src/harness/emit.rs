//! Result serialization.
//!
//! Rows go out as CSV (one header row, fixed column order) or as a pretty
//! JSON array. Apart from the opt-in runtime columns every field is a pure
//! function of the configuration, so emitting the same experiment twice
//! yields byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use super::HarnessError;

/// One aggregate result: a (grid point, policy, metric) cell reduced over
/// replications. Runtime columns stay empty unless timings were requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub parameter: f64,
    pub policy: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub n: u32,
    pub seed: u64,
    pub runtime_policy_s: Option<f64>,
    pub runtime_total_s: Option<f64>,
}

pub fn emit(
    rows: &[ResultRow],
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), HarnessError> {
    if rows.is_empty() {
        return Err(HarnessError::NoRows);
    }
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            for row in rows {
                writer
                    .serialize(row)
                    .map_err(|e| HarnessError::Serialize(e.to_string()))?;
            }
            writer
                .flush()
                .map_err(|e| HarnessError::Serialize(e.to_string()))?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)
                .map_err(|e| HarnessError::Serialize(e.to_string()))?;
            writeln!(out).map_err(|e| HarnessError::Serialize(e.to_string()))?;
        }
    }
    Ok(())
}

pub fn emit_to_path(
    rows: &[ResultRow],
    format: OutputFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    let mut out = open_for_write(path)?;
    emit(rows, format, &mut out)?;
    out.flush().map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SeriesRow {
    round: u64,
    cumulative_diff: f64,
}

/// Write a per-round series (the replay reward-difference curve) in the same
/// format family as the result rows.
pub fn write_series(
    series: &[f64],
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), HarnessError> {
    if series.is_empty() {
        return Err(HarnessError::NoRows);
    }
    let rows: Vec<SeriesRow> = series
        .iter()
        .enumerate()
        .map(|(i, &v)| SeriesRow {
            round: i as u64 + 1,
            cumulative_diff: v,
        })
        .collect();
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            for row in &rows {
                writer
                    .serialize(row)
                    .map_err(|e| HarnessError::Serialize(e.to_string()))?;
            }
            writer
                .flush()
                .map_err(|e| HarnessError::Serialize(e.to_string()))?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)
                .map_err(|e| HarnessError::Serialize(e.to_string()))?;
            writeln!(out).map_err(|e| HarnessError::Serialize(e.to_string()))?;
        }
    }
    Ok(())
}

pub fn write_series_to_path(
    series: &[f64],
    format: OutputFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    let mut out = open_for_write(path)?;
    write_series(series, format, &mut out)?;
    out.flush().map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn open_for_write(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| HarnessError::Io {
                path: parent.to_path_buf(),
                message: e.to_string(),
            })?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

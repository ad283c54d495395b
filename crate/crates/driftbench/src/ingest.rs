//! Loading recorded scalar series from delimited text files.
//!
//! The two bundled presets match the public UCI recordings used by the
//! replay experiments: the Beijing air-quality log (comma separated, hourly
//! pm2.5 readings, gaps marked `NA`) and the household power log (semicolon
//! separated, minutely active power, gaps marked `?`). Rows whose selected
//! field is missing or unparseable are skipped and counted, never imputed.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum IngestError {
    Io { path: PathBuf, message: String },
    Parse { path: PathBuf, message: String },
    ColumnNotFound { column: String, available: Vec<String> },
    NoValues { path: PathBuf },
    EmptyInput,
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::Io { path, message } => {
                write!(f, "cannot read {}: {message}", path.display())
            }
            IngestError::Parse { path, message } => {
                write!(f, "cannot parse {}: {message}", path.display())
            }
            IngestError::ColumnNotFound { column, available } => {
                write!(
                    f,
                    "column '{column}' not found; header has: {}",
                    available.join(", ")
                )
            }
            IngestError::NoValues { path } => {
                write!(f, "no usable numeric values in {}", path.display())
            }
            IngestError::EmptyInput => write!(f, "empty value list"),
        }
    }
}

impl std::error::Error for IngestError {}

/// Which field of each row carries the series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

/// A delimited text file plus everything needed to pull one numeric column
/// out of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSource {
    pub path: PathBuf,
    pub column: ColumnSelector,
    pub delimiter: u8,
    pub has_header: bool,
    /// Field values (after trimming) treated as missing.
    pub missing_tokens: Vec<String>,
}

impl SeriesSource {
    /// Hourly Beijing pm2.5 readings: comma separated, `pm2.5` column,
    /// missing hours marked `NA`.
    pub fn beijing_pm25(path: impl Into<PathBuf>) -> SeriesSource {
        SeriesSource {
            path: path.into(),
            column: ColumnSelector::Name("pm2.5".to_string()),
            delimiter: b',',
            has_header: true,
            missing_tokens: vec!["NA".to_string(), String::new()],
        }
    }

    /// Minutely household active power: semicolon separated,
    /// `Global_active_power` column, missing minutes marked `?`.
    pub fn household_power(path: impl Into<PathBuf>) -> SeriesSource {
        SeriesSource {
            path: path.into(),
            column: ColumnSelector::Name("Global_active_power".to_string()),
            delimiter: b';',
            has_header: true,
            missing_tokens: vec!["?".to_string(), String::new()],
        }
    }

    /// Any comma-separated file. Selecting a column by name implies a header
    /// row; selecting by index reads every row as data, so a stray header
    /// simply counts as one skipped row.
    pub fn generic_csv(path: impl Into<PathBuf>, column: ColumnSelector) -> SeriesSource {
        let has_header = matches!(column, ColumnSelector::Name(_));
        SeriesSource {
            path: path.into(),
            column,
            delimiter: b',',
            has_header,
            missing_tokens: ["", "NA", "na", "?", "nan", "NaN", "null"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

/// The usable values of a loaded series, in file order, plus how many rows
/// were dropped for missing or unparseable fields.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSeries {
    pub values: Vec<f64>,
    pub skipped: usize,
}

pub fn load_series(src: &SeriesSource) -> Result<LoadedSeries, IngestError> {
    let file = File::open(&src.path).map_err(|e| IngestError::Io {
        path: src.path.clone(),
        message: e.to_string(),
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(src.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(BufReader::new(file));

    let mut records = reader.records();
    let header = if src.has_header {
        match records.next() {
            Some(Ok(record)) => Some(record),
            Some(Err(e)) => {
                return Err(IngestError::Parse {
                    path: src.path.clone(),
                    message: e.to_string(),
                })
            }
            None => {
                return Err(IngestError::NoValues {
                    path: src.path.clone(),
                })
            }
        }
    } else {
        None
    };
    let field_index = match (&src.column, &header) {
        (ColumnSelector::Index(i), _) => *i,
        (ColumnSelector::Name(name), Some(header)) => {
            match header.iter().position(|h| h.trim() == name) {
                Some(i) => i,
                None => {
                    return Err(IngestError::ColumnNotFound {
                        column: name.clone(),
                        available: header.iter().map(|h| h.trim().to_string()).collect(),
                    })
                }
            }
        }
        (ColumnSelector::Name(name), None) => {
            return Err(IngestError::ColumnNotFound {
                column: name.clone(),
                available: Vec::new(),
            })
        }
    };

    let mut values = Vec::new();
    let mut skipped = 0usize;
    for record in records {
        let record = record.map_err(|e| IngestError::Parse {
            path: src.path.clone(),
            message: e.to_string(),
        })?;
        let field = record.get(field_index).map(str::trim);
        let usable = match field {
            None => None,
            Some(raw) if src.missing_tokens.iter().any(|m| m == raw) => None,
            Some(raw) => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Some(v),
                _ => None,
            },
        };
        match usable {
            Some(v) => values.push(v),
            None => skipped += 1,
        }
    }
    if values.is_empty() {
        return Err(IngestError::NoValues {
            path: src.path.clone(),
        });
    }
    Ok(LoadedSeries { values, skipped })
}

/// Median of the values (the lower of the two middle elements for even
/// counts), rounded to the nearest integer with halves away from zero.
pub fn rounded_median(values: &[f64]) -> Result<f64, IngestError> {
    if values.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[(sorted.len() - 1) / 2].round())
}

/// Convenience wrapper: path helpers used by the harness presets.
pub fn default_data_path(file_name: &str) -> PathBuf {
    Path::new("data").join(file_name)
}

//! Command-line front end: parse flags (optionally merged over a TOML file),
//! build the experiment configuration, run it, and emit results.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use driftbench::harness::{
    emit, emit_to_path, load_file_config, run_experiment, run_replay, write_series_to_path,
    DatasetSpec, ExperimentConfig, ExperimentKind, FileConfig, HarnessError, OutputFormat,
};
use driftbench::policies::PolicyKind;

#[derive(Parser)]
#[command(
    name = "driftbench",
    version,
    about = "Benchmark harness for online expert selection under shifting rewards"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// Policies to run, comma separated: ftl, ftbi, anh.
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<String>>,

    /// Replications per grid point.
    #[arg(long)]
    reps: Option<u32>,

    /// Base seed; replication r derives its streams from seed + r.
    #[arg(long)]
    seed: Option<u64>,

    /// How the hedging baseline commits: sampled or fractional.
    #[arg(long = "anh-mode")]
    anh_mode: Option<String>,

    /// Result file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,

    /// Worker threads for replication units (0 = one per core, 1 = in-process).
    #[arg(long)]
    jobs: Option<usize>,

    /// Fill the wall-clock columns. Off by default so identical runs produce
    /// byte-identical files.
    #[arg(long)]
    timings: bool,

    /// TOML file with the same keys as these flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the reward gap between two experts over two segments.
    Gap {
        #[command(flatten)]
        common: CommonArgs,
        /// Gap values in [0, 1], comma separated.
        #[arg(long, value_delimiter = ',')]
        gaps: Option<Vec<f64>>,
    },
    /// Sweep the number of stationary segments with random reward rates.
    Shifts {
        #[command(flatten)]
        common: CommonArgs,
        /// Segment counts, comma separated.
        #[arg(long, value_delimiter = ',')]
        shifts: Option<Vec<u64>>,
    },
    /// Sweep the length of two segments whose best expert swaps.
    Seglen {
        #[command(flatten)]
        common: CommonArgs,
        /// Segment lengths, comma separated.
        #[arg(long, value_delimiter = ',')]
        seglens: Option<Vec<u64>>,
    },
    /// Sweep the number of experts with random per-segment rates.
    Experts {
        #[command(flatten)]
        common: CommonArgs,
        /// Expert counts, comma separated.
        #[arg(long, value_delimiter = ',')]
        experts: Option<Vec<u64>>,
    },
    /// Sweep the horizon with sqrt(T) shifts at a fixed gap.
    ScaledN {
        #[command(flatten)]
        common: CommonArgs,
        /// Horizons (perfect squares), comma separated.
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<u64>>,
    },
    /// Sweep the horizon with ten shifts and gap 1/sqrt(T).
    ScaledDelta {
        #[command(flatten)]
        common: CommonArgs,
        /// Horizons (multiples of 10), comma separated.
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<u64>>,
    },
    /// Sweep the horizon with sqrt(T) shifts and gap 1/sqrt(T).
    ScaledBoth {
        #[command(flatten)]
        common: CommonArgs,
        /// Horizons (perfect squares), comma separated.
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<u64>>,
    },
    /// Measure per-round policy work across horizons.
    Bench {
        #[command(flatten)]
        common: CommonArgs,
        /// Horizons, comma separated.
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<u64>>,
    },
    /// Replay a recorded series thresholded into two experts.
    Replay {
        #[command(flatten)]
        common: CommonArgs,
        /// pm25[:PATH] | power[:PATH] | square | csv:PATH
        #[arg(long)]
        dataset: Option<String>,
        /// Threshold override; each dataset has a sensible default.
        #[arg(long)]
        threshold: Option<f64>,
        /// Column name for csv datasets (first column when omitted).
        #[arg(long)]
        column: Option<String>,
        /// Where to write the cumulative reward-difference series.
        #[arg(long = "series-out")]
        series_out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = execute(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    let cfg = build_config(cli)?;
    if cfg.kind == ExperimentKind::Replay {
        let output = run_replay(&cfg)?;
        write_rows(&output.rows, &cfg)?;
        if let Some(series_path) = series_path(&cfg) {
            write_series_to_path(&output.series, cfg.format, &series_path)?;
            eprintln!(
                "wrote {} series points to {}",
                output.series.len(),
                series_path.display()
            );
        }
    } else {
        let rows = run_experiment(&cfg)?;
        write_rows(&rows, &cfg)?;
    }
    Ok(())
}

fn write_rows(
    rows: &[driftbench::harness::ResultRow],
    cfg: &ExperimentConfig,
) -> Result<(), HarnessError> {
    match &cfg.out {
        Some(path) => {
            emit_to_path(rows, cfg.format, path)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit(rows, cfg.format, &mut lock)
        }
    }
}

/// Explicit series destination, or one derived from the result path;
/// nothing when both are absent (stdout runs skip the series).
fn series_path(cfg: &ExperimentConfig) -> Option<PathBuf> {
    if cfg.series_out.is_some() {
        return cfg.series_out.clone();
    }
    cfg.out.as_ref().map(|out| {
        let ext = match cfg.format {
            OutputFormat::Csv => "series.csv",
            OutputFormat::Json => "series.json",
        };
        out.with_extension(ext)
    })
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, HarnessError> {
    match cli.command {
        Command::Gap { common, gaps } => {
            let (mut cfg, file) = base_config(ExperimentKind::Gap, &common)?;
            cfg.grid = gaps.or(file.gaps);
            Ok(cfg)
        }
        Command::Shifts { common, shifts } => {
            let (mut cfg, file) = base_config(ExperimentKind::Shifts, &common)?;
            cfg.grid = int_grid(shifts).or_else(|| int_grid(file.shifts.clone()));
            Ok(cfg)
        }
        Command::Seglen { common, seglens } => {
            let (mut cfg, file) = base_config(ExperimentKind::SegLen, &common)?;
            cfg.grid = int_grid(seglens).or_else(|| int_grid(file.seglens.clone()));
            Ok(cfg)
        }
        Command::Experts { common, experts } => {
            let (mut cfg, file) = base_config(ExperimentKind::Experts, &common)?;
            cfg.grid = int_grid(experts).or_else(|| int_grid(file.experts.clone()));
            Ok(cfg)
        }
        Command::ScaledN { common, horizons } => {
            let (mut cfg, file) = base_config(ExperimentKind::ScaledN, &common)?;
            cfg.grid = int_grid(horizons).or_else(|| int_grid(file.horizons.clone()));
            Ok(cfg)
        }
        Command::ScaledDelta { common, horizons } => {
            let (mut cfg, file) = base_config(ExperimentKind::ScaledDelta, &common)?;
            cfg.grid = int_grid(horizons).or_else(|| int_grid(file.horizons.clone()));
            Ok(cfg)
        }
        Command::ScaledBoth { common, horizons } => {
            let (mut cfg, file) = base_config(ExperimentKind::ScaledBoth, &common)?;
            cfg.grid = int_grid(horizons).or_else(|| int_grid(file.horizons.clone()));
            Ok(cfg)
        }
        Command::Bench { common, horizons } => {
            let (mut cfg, file) = base_config(ExperimentKind::Bench, &common)?;
            cfg.grid = int_grid(horizons).or_else(|| int_grid(file.horizons.clone()));
            Ok(cfg)
        }
        Command::Replay {
            common,
            dataset,
            threshold,
            column,
            series_out,
        } => {
            let (mut cfg, file) = base_config(ExperimentKind::Replay, &common)?;
            if let Some(token) = dataset.or_else(|| file.dataset.clone()) {
                cfg.replay.dataset = token
                    .parse::<DatasetSpec>()
                    .map_err(HarnessError::Config)?;
            }
            cfg.replay.threshold = threshold.or(file.threshold);
            cfg.replay.column = column.or_else(|| file.column.clone());
            cfg.series_out = series_out.or_else(|| file.series_out.clone());
            Ok(cfg)
        }
    }
}

fn base_config(
    kind: ExperimentKind,
    common: &CommonArgs,
) -> Result<(ExperimentConfig, FileConfig), HarnessError> {
    let file = match &common.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };
    let mut cfg = ExperimentConfig::new(kind);
    if let Some(tokens) = common.policies.clone().or_else(|| file.policies.clone()) {
        cfg.policies = tokens
            .iter()
            .map(|t| t.parse::<PolicyKind>().map_err(HarnessError::Config))
            .collect::<Result<Vec<_>, _>>()?;
    }
    if let Some(reps) = common.reps.or(file.replications) {
        cfg.replications = reps;
    }
    if let Some(seed) = common.seed.or(file.seed) {
        cfg.base_seed = seed;
    }
    if let Some(token) = common.anh_mode.clone().or_else(|| file.anh_mode.clone()) {
        cfg.anh_mode = token.parse().map_err(HarnessError::Config)?;
    }
    if let Some(token) = common.format.clone().or_else(|| file.format.clone()) {
        cfg.format = token.parse().map_err(HarnessError::Config)?;
    }
    if let Some(jobs) = common.jobs.or(file.jobs) {
        cfg.jobs = jobs;
    }
    cfg.timings = common.timings || file.timings.unwrap_or(false);
    cfg.out = common.out.clone().or_else(|| file.out.clone());
    Ok((cfg, file))
}

fn int_grid(values: Option<Vec<u64>>) -> Option<Vec<f64>> {
    values.map(|v| v.into_iter().map(|x| x as f64).collect())
}

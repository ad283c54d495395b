//! Replication runner.
//!
//! Experiments expand into (grid point, replication) units. A unit draws its
//! environment from the replication's environment stream, replays the same
//! reward sequence through every configured policy (each on its own policy
//! stream), and reduces the traces to scalars immediately. Units are
//! independent, so they can run on a thread pool; ordering and random streams
//! never depend on the schedule.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::envs::{
    default_grid, square_wave_series, sweep_spec, Segment, SegmentTruth, SegmentedBernoulliSpec,
    ThresholdReplaySpec,
};
use crate::ingest::{default_data_path, load_series, rounded_median, ColumnSelector, SeriesSource};
use crate::metrics::{
    aggregate, cumulative_reward_diff, realized_regret, total_reward, RoundRecord, RunTrace,
};
use crate::policies::{build_policy, AnhMode, PolicyKind, RewardVector};

use super::config::{DatasetSpec, ExperimentConfig, ExperimentKind, ReplayParams};
use super::emit::ResultRow;
use super::seeds::{policy_seed, stream_rng, ENV_STREAM};
use super::HarnessError;

const BENCH_GRID: [f64; 5] = [10.0, 100.0, 1000.0, 10000.0, 100000.0];
const SQUARE_PERIOD: u64 = 200;
const SQUARE_HORIZON: u64 = 4000;
const PM25_FILE: &str = "PRSA_data_2010.1.1-2014.12.31.csv";
const POWER_FILE: &str = "household_power_consumption.txt";
const PM25_THRESHOLD: f64 = 75.0;
const POWER_THRESHOLD: f64 = 0.5;

// ---------------------------------------------------------------------------
// Single replication
// ---------------------------------------------------------------------------

/// Replay one reward sequence through a fresh policy and record the full
/// trace. The policy's expert count is taken from the rewards.
pub fn run_policy(
    kind: PolicyKind,
    seed: u64,
    anh_mode: AnhMode,
    rewards: &[RewardVector],
) -> Result<RunTrace, HarnessError> {
    let first = rewards.first().ok_or(HarnessError::NoRewards)?;
    let total_start = Instant::now();
    let mut policy = build_policy(kind, first.num_experts(), seed, anh_mode)?;
    let mut rounds = Vec::with_capacity(rewards.len());
    let mut policy_time = Duration::ZERO;
    for reward in rewards {
        let began = Instant::now();
        let decision = policy.choose();
        policy.update(reward, &decision)?;
        policy_time += began.elapsed();
        let obtained = if policy.fractional() {
            decision
                .distribution
                .as_ref()
                .expect("fractional policies always carry a distribution")
                .iter()
                .zip(reward.as_slice())
                .map(|(p, r)| p * r)
                .sum()
        } else {
            reward.get(decision.expert)
        };
        rounds.push(RoundRecord {
            expert: decision.expert,
            interval: decision.interval,
            rewards: reward.clone(),
            obtained,
            updates: policy.updates_last_round(),
        });
    }
    Ok(RunTrace {
        policy: kind,
        seed,
        fractional: policy.fractional(),
        rounds,
        policy_time,
        total_time: total_start.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// Sweep and bench units
// ---------------------------------------------------------------------------

/// Scalars kept from one (point, replication, policy) run; traces are
/// reduced here and dropped.
struct UnitCell {
    point: usize,
    policy_idx: usize,
    regret: f64,
    updates_total: u64,
    horizon: u64,
    policy_s: f64,
    total_s: f64,
}

/// Two equal halves with rates 0.7 / 0.5 swapped; the work-measurement
/// environment where only the horizon varies.
fn bench_spec(value: f64) -> Result<SegmentedBernoulliSpec, HarnessError> {
    if !value.is_finite() || value.fract() != 0.0 || value < 2.0 {
        return Err(HarnessError::Config(format!(
            "bench horizon {value} must be an integer >= 2"
        )));
    }
    let t = value as u64;
    Ok(SegmentedBernoulliSpec::new(vec![
        Segment {
            length: t / 2,
            params: vec![0.7, 0.5],
        },
        Segment {
            length: t - t / 2,
            params: vec![0.5, 0.7],
        },
    ])?)
}

fn unit_env(
    cfg: &ExperimentConfig,
    value: f64,
    point: usize,
    rep: u32,
) -> Result<(Vec<RewardVector>, SegmentTruth), HarnessError> {
    let rep_seed = cfg.base_seed + rep as u64;
    let mut env_rng = stream_rng(rep_seed, point as u64, ENV_STREAM);
    let spec = match cfg.kind.sweep_kind() {
        Some(kind) => sweep_spec(kind, value, &mut env_rng)?,
        None => bench_spec(value)?,
    };
    let rewards = spec.sample_all(&mut env_rng);
    let truth = spec.truth();
    Ok((rewards, truth))
}

fn run_units(cfg: &ExperimentConfig, grid: &[f64]) -> Result<Vec<UnitCell>, HarnessError> {
    let units: Vec<(usize, u32)> = (0..grid.len())
        .flat_map(|point| (0..cfg.replications).map(move |rep| (point, rep)))
        .collect();
    let work = |&(point, rep): &(usize, u32)| -> Result<Vec<UnitCell>, HarnessError> {
        let (rewards, truth) = unit_env(cfg, grid[point], point, rep)?;
        let rep_seed = cfg.base_seed + rep as u64;
        let mut cells = Vec::with_capacity(cfg.policies.len());
        for (policy_idx, &policy) in cfg.policies.iter().enumerate() {
            let seed = policy_seed(rep_seed, point as u64, policy);
            let trace = run_policy(policy, seed, cfg.anh_mode, &rewards)?;
            cells.push(UnitCell {
                point,
                policy_idx,
                regret: realized_regret(&trace, &truth)?,
                updates_total: trace.rounds.iter().map(|r| r.updates).sum(),
                horizon: trace.horizon(),
                policy_s: trace.policy_time.as_secs_f64(),
                total_s: trace.total_time.as_secs_f64(),
            });
        }
        Ok(cells)
    };
    // jobs == 1 avoids the pool entirely; any other value shares one pool
    // for the whole run. Units are collected in input order either way.
    let nested: Result<Vec<Vec<UnitCell>>, HarnessError> = if cfg.jobs == 1 {
        units.iter().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
        pool.install(|| units.par_iter().map(work).collect())
    };
    Ok(nested?.into_iter().flatten().collect())
}

/// Group flattened cells as (point, policy) -> cells in replication order.
fn group_cells(cells: &[UnitCell]) -> HashMap<(usize, usize), Vec<&UnitCell>> {
    let mut grouped: HashMap<(usize, usize), Vec<&UnitCell>> = HashMap::new();
    for cell in cells {
        grouped
            .entry((cell.point, cell.policy_idx))
            .or_default()
            .push(cell);
    }
    grouped
}

fn make_row(
    cfg: &ExperimentConfig,
    parameter: f64,
    policy: PolicyKind,
    metric: &str,
    values: &[f64],
    cells: &[&UnitCell],
) -> Result<ResultRow, HarnessError> {
    let stats = aggregate(values)?;
    let mean_over = |f: fn(&UnitCell) -> f64| -> f64 {
        cells.iter().map(|c| f(c)).sum::<f64>() / cells.len() as f64
    };
    Ok(ResultRow {
        experiment: cfg.kind.name().to_string(),
        parameter,
        policy: policy.name().to_string(),
        metric: metric.to_string(),
        mean: stats.mean,
        std: stats.std,
        n: stats.n as u32,
        seed: cfg.base_seed,
        runtime_policy_s: cfg.timings.then(|| mean_over(|c| c.policy_s)),
        runtime_total_s: cfg.timings.then(|| mean_over(|c| c.total_s)),
    })
}

fn sweep_rows(cfg: &ExperimentConfig, grid: &[f64]) -> Result<Vec<ResultRow>, HarnessError> {
    let cells = run_units(cfg, grid)?;
    let grouped = group_cells(&cells);
    let mut rows = Vec::new();
    for (point, &parameter) in grid.iter().enumerate() {
        for (policy_idx, &policy) in cfg.policies.iter().enumerate() {
            let cell_group = &grouped[&(point, policy_idx)];
            let regrets: Vec<f64> = cell_group.iter().map(|c| c.regret).collect();
            rows.push(make_row(cfg, parameter, policy, "regret", &regrets, cell_group)?);
        }
    }
    Ok(rows)
}

fn bench_rows(cfg: &ExperimentConfig, grid: &[f64]) -> Result<Vec<ResultRow>, HarnessError> {
    let cells = run_units(cfg, grid)?;
    let grouped = group_cells(&cells);
    let mut rows = Vec::new();
    for (point, &parameter) in grid.iter().enumerate() {
        for (policy_idx, &policy) in cfg.policies.iter().enumerate() {
            let cell_group = &grouped[&(point, policy_idx)];
            let totals: Vec<f64> = cell_group.iter().map(|c| c.updates_total as f64).collect();
            let per_round: Vec<f64> = cell_group
                .iter()
                .map(|c| c.updates_total as f64 / c.horizon as f64)
                .collect();
            rows.push(make_row(cfg, parameter, policy, "updates_total", &totals, cell_group)?);
            rows.push(make_row(
                cfg,
                parameter,
                policy,
                "updates_per_round",
                &per_round,
                cell_group,
            )?);
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

/// Result of a replay run: the aggregate rows plus the per-round cumulative
/// reward difference of the underlying two-expert stream.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutput {
    pub rows: Vec<ResultRow>,
    pub series: Vec<f64>,
}

fn resolve_dataset(params: &ReplayParams) -> Result<(Vec<f64>, f64), HarnessError> {
    match &params.dataset {
        DatasetSpec::SquareWave => Ok((
            square_wave_series(SQUARE_PERIOD, SQUARE_HORIZON),
            params.threshold.unwrap_or(POWER_THRESHOLD),
        )),
        DatasetSpec::Pm25 { path } => {
            let path = path
                .clone()
                .unwrap_or_else(|| default_data_path(PM25_FILE));
            let loaded = load_series(&SeriesSource::beijing_pm25(&path))?;
            let threshold = match params.threshold {
                Some(t) => t,
                None => {
                    // The preset pins the threshold; a drifted recomputed
                    // median means the file is not the expected recording.
                    let median = rounded_median(&loaded.values)?;
                    if median != PM25_THRESHOLD {
                        eprintln!(
                            "note: rounded median of {} is {median}, keeping pinned threshold {PM25_THRESHOLD}",
                            path.display()
                        );
                    }
                    PM25_THRESHOLD
                }
            };
            Ok((loaded.values, threshold))
        }
        DatasetSpec::Power { path } => {
            let path = path
                .clone()
                .unwrap_or_else(|| default_data_path(POWER_FILE));
            let loaded = load_series(&SeriesSource::household_power(&path))?;
            Ok((loaded.values, params.threshold.unwrap_or(POWER_THRESHOLD)))
        }
        DatasetSpec::Csv { path } => {
            let column = match &params.column {
                Some(name) => ColumnSelector::Name(name.clone()),
                None => ColumnSelector::Index(0),
            };
            let loaded = load_series(&SeriesSource::generic_csv(path, column))?;
            let threshold = match params.threshold {
                Some(t) => t,
                None => rounded_median(&loaded.values)?,
            };
            Ok((loaded.values, threshold))
        }
    }
}

/// Threshold a recorded series into a two-expert stream and run every
/// configured policy over it. Alongside the rows this returns the cumulative
/// reward-difference series, the standard picture of where the recording's
/// favored side flips.
pub fn run_replay(cfg: &ExperimentConfig) -> Result<ReplayOutput, HarnessError> {
    cfg.validate()?;
    if cfg.kind != ExperimentKind::Replay {
        return Err(HarnessError::Config(format!(
            "run_replay called with kind '{}'",
            cfg.kind
        )));
    }
    let (values, threshold) = resolve_dataset(&cfg.replay)?;
    let spec = ThresholdReplaySpec::new(values, threshold)?;
    let rewards = spec.rewards();
    let series = cumulative_reward_diff(&rewards)?;

    let reps = cfg.replications as usize;
    let mut totals: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); cfg.policies.len()];
    let mut policy_s: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); cfg.policies.len()];
    let mut total_s: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); cfg.policies.len()];
    for rep in 0..cfg.replications {
        let rep_seed = cfg.base_seed + rep as u64;
        for (policy_idx, &policy) in cfg.policies.iter().enumerate() {
            let seed = policy_seed(rep_seed, 0, policy);
            let trace = run_policy(policy, seed, cfg.anh_mode, &rewards)?;
            totals[policy_idx].push(total_reward(&trace));
            policy_s[policy_idx].push(trace.policy_time.as_secs_f64());
            total_s[policy_idx].push(trace.total_time.as_secs_f64());
        }
    }

    let mean_of = |values: &[f64]| values.iter().sum::<f64>() / values.len() as f64;
    let mut rows = Vec::new();
    for (policy_idx, &policy) in cfg.policies.iter().enumerate() {
        let stats = aggregate(&totals[policy_idx])?;
        rows.push(ResultRow {
            experiment: cfg.kind.name().to_string(),
            parameter: threshold,
            policy: policy.name().to_string(),
            metric: "total_reward".to_string(),
            mean: stats.mean,
            std: stats.std,
            n: stats.n as u32,
            seed: cfg.base_seed,
            runtime_policy_s: cfg.timings.then(|| mean_of(&policy_s[policy_idx])),
            runtime_total_s: cfg.timings.then(|| mean_of(&total_s[policy_idx])),
        });
    }
    if let Some(ftl_idx) = cfg.policies.iter().position(|&p| p == PolicyKind::Ftl) {
        for (policy_idx, &policy) in cfg.policies.iter().enumerate() {
            if policy_idx == ftl_idx {
                continue;
            }
            let lifts = (0..reps)
                .map(|r| {
                    crate::metrics::relative_lift(totals[policy_idx][r], totals[ftl_idx][r])
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let stats = aggregate(&lifts)?;
            rows.push(ResultRow {
                experiment: cfg.kind.name().to_string(),
                parameter: threshold,
                policy: policy.name().to_string(),
                metric: "lift_vs_ftl_pct".to_string(),
                mean: stats.mean,
                std: stats.std,
                n: stats.n as u32,
                seed: cfg.base_seed,
                runtime_policy_s: None,
                runtime_total_s: None,
            });
        }
    }
    Ok(ReplayOutput { rows, series })
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Run a configured experiment to completion and return its result rows in
/// deterministic order: grid point, then policy, then metric.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::Replay => Ok(run_replay(cfg)?.rows),
        ExperimentKind::Bench => {
            let grid = cfg.grid.clone().unwrap_or_else(|| BENCH_GRID.to_vec());
            bench_rows(cfg, &grid)
        }
        _ => {
            let kind = cfg.kind.sweep_kind().expect("synthetic kinds sweep");
            let grid = cfg.grid.clone().unwrap_or_else(|| default_grid(kind));
            sweep_rows(cfg, &grid)
        }
    }
}

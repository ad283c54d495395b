//! Reward environments.
//!
//! Synthetic rounds come from piecewise-stationary Bernoulli arms: the
//! timeline is split into segments, each segment fixes one success rate per
//! expert, and every round draws an independent 0/1 reward per expert. Replay
//! rounds come from a recorded scalar series thresholded into a two-expert
//! reward stream, or from arbitrary pre-built reward rows.
//!
//! The sweep constructors build the benchmark families: swept reward gap,
//! swept shift count, swept segment length, swept expert count, and the
//! scaled families where the shift count or the gap (or both) are tied to the
//! horizon.

use std::fmt;

use rand::Rng;

use crate::policies::RewardVector;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum EnvError {
    NoSegments,
    EmptySegment { segment: usize },
    TooFewExperts { count: usize },
    ExpertCountMismatch { segment: usize, expected: usize, got: usize },
    ParamOutOfRange { segment: usize, expert: usize, value: f64 },
    TimeOutOfRange { t: u64, horizon: u64 },
    EmptySeries,
    NonFiniteSample { position: usize },
    EmptyReplay,
    ReplayShapeMismatch { row: usize, expected: usize, got: usize },
    ReplayRewardOutOfRange { row: usize, expert: usize, value: f64 },
    BadSweepValue { value: f64, reason: &'static str },
}

impl fmt::Display for EnvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvError::NoSegments => write!(f, "environment needs at least one segment"),
            EnvError::EmptySegment { segment } => {
                write!(f, "segment {segment} has zero length")
            }
            EnvError::TooFewExperts { count } => {
                write!(f, "need at least 2 experts, got {count}")
            }
            EnvError::ExpertCountMismatch { segment, expected, got } => {
                write!(f, "segment {segment} has {got} params, expected {expected}")
            }
            EnvError::ParamOutOfRange { segment, expert, value } => {
                write!(f, "segment {segment}, expert {expert}: success rate {value} outside [0, 1]")
            }
            EnvError::TimeOutOfRange { t, horizon } => {
                write!(f, "round {t} outside the horizon 1..={horizon}")
            }
            EnvError::EmptySeries => write!(f, "replay series is empty"),
            EnvError::NonFiniteSample { position } => {
                write!(f, "replay series value at position {position} is not finite")
            }
            EnvError::EmptyReplay => write!(f, "replay reward table is empty"),
            EnvError::ReplayShapeMismatch { row, expected, got } => {
                write!(f, "replay row {row} has {got} entries, expected {expected}")
            }
            EnvError::ReplayRewardOutOfRange { row, expert, value } => {
                write!(f, "replay row {row}, expert {expert}: reward {value} outside [0, 1]")
            }
            EnvError::BadSweepValue { value, reason } => {
                write!(f, "sweep value {value} rejected: {reason}")
            }
        }
    }
}

impl std::error::Error for EnvError {}

// ---------------------------------------------------------------------------
// Segmented Bernoulli environments
// ---------------------------------------------------------------------------

/// One stationary stretch: `length` rounds with a fixed success rate per
/// expert.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub length: u64,
    pub params: Vec<f64>,
}

/// A piecewise-stationary Bernoulli reward process. Rounds are 1-based;
/// round t belongs to the unique segment whose cumulative boundary window
/// contains it.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedBernoulliSpec {
    segments: Vec<Segment>,
    /// Cumulative boundaries 0 = b[0] < b[1] < ... < b[N] = horizon.
    boundaries: Vec<u64>,
}

impl SegmentedBernoulliSpec {
    pub fn new(segments: Vec<Segment>) -> Result<Self, EnvError> {
        if segments.is_empty() {
            return Err(EnvError::NoSegments);
        }
        let num_experts = segments[0].params.len();
        if num_experts < 2 {
            return Err(EnvError::TooFewExperts { count: num_experts });
        }
        let mut boundaries = Vec::with_capacity(segments.len() + 1);
        boundaries.push(0u64);
        for (i, seg) in segments.iter().enumerate() {
            if seg.length == 0 {
                return Err(EnvError::EmptySegment { segment: i });
            }
            if seg.params.len() != num_experts {
                return Err(EnvError::ExpertCountMismatch {
                    segment: i,
                    expected: num_experts,
                    got: seg.params.len(),
                });
            }
            for (k, &p) in seg.params.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(EnvError::ParamOutOfRange {
                        segment: i,
                        expert: k,
                        value: p,
                    });
                }
            }
            boundaries.push(boundaries[i] + seg.length);
        }
        Ok(SegmentedBernoulliSpec {
            segments,
            boundaries,
        })
    }

    pub fn num_experts(&self) -> usize {
        self.segments[0].params.len()
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn horizon(&self) -> u64 {
        *self.boundaries.last().unwrap()
    }

    /// Cumulative boundaries including the leading 0 and the horizon.
    pub fn boundaries(&self) -> &[u64] {
        &self.boundaries
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Index of the segment containing round t.
    pub fn segment_index(&self, t: u64) -> Result<usize, EnvError> {
        if t == 0 || t > self.horizon() {
            return Err(EnvError::TimeOutOfRange {
                t,
                horizon: self.horizon(),
            });
        }
        // partition_point finds the first boundary >= t; boundaries[i] < t <=
        // boundaries[i + 1] puts t in segment i.
        let idx = self.boundaries.partition_point(|&b| b < t);
        Ok(idx - 1)
    }

    /// Draw one round's rewards: an independent Bernoulli sample per expert,
    /// in expert order.
    pub fn sample_round(&self, t: u64, rng: &mut impl Rng) -> Result<RewardVector, EnvError> {
        let seg = &self.segments[self.segment_index(t)?];
        let rewards = seg
            .params
            .iter()
            .map(|&p| if rng.random_bool(p) { 1.0 } else { 0.0 })
            .collect();
        Ok(RewardVector::new(rewards).expect("validated params yield valid rewards"))
    }

    /// Draw the whole horizon in round order. Consumes the generator exactly
    /// as `sample_round` called for t = 1..=horizon would.
    pub fn sample_all(&self, rng: &mut impl Rng) -> Vec<RewardVector> {
        let mut out = Vec::with_capacity(self.horizon() as usize);
        for seg in &self.segments {
            for _ in 0..seg.length {
                let rewards = seg
                    .params
                    .iter()
                    .map(|&p| if rng.random_bool(p) { 1.0 } else { 0.0 })
                    .collect();
                out.push(RewardVector::new(rewards).expect("validated params"));
            }
        }
        out
    }

    /// Per-segment ground truth for regret accounting.
    pub fn truth(&self) -> SegmentTruth {
        let entries = self
            .segments
            .iter()
            .zip(self.boundaries.windows(2))
            .map(|(seg, w)| {
                let best = argmax_param(&seg.params);
                let runner_up = seg
                    .params
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != best)
                    .map(|(_, &p)| p)
                    .fold(f64::NEG_INFINITY, f64::max);
                TruthEntry {
                    first: w[0] + 1,
                    last: w[1],
                    best,
                    gap: seg.params[best] - runner_up,
                }
            })
            .collect::<Vec<_>>();
        let min_gap = entries.iter().map(|e| e.gap).fold(f64::INFINITY, f64::min);
        SegmentTruth { entries, min_gap }
    }
}

fn argmax_param(params: &[f64]) -> usize {
    let mut best = 0;
    for (k, &p) in params.iter().enumerate().skip(1) {
        if p > params[best] {
            best = k;
        }
    }
    best
}

/// Which expert is best on each stationary stretch, with the margin over the
/// runner-up. `min_gap` is the smallest of those margins; zero is possible
/// when two experts tie.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentTruth {
    pub entries: Vec<TruthEntry>,
    pub min_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthEntry {
    pub first: u64,
    pub last: u64,
    pub best: usize,
    pub gap: f64,
}

impl SegmentTruth {
    pub fn horizon(&self) -> u64 {
        self.entries.last().map(|e| e.last).unwrap_or(0)
    }
}

// ---------------------------------------------------------------------------
// Replay environments
// ---------------------------------------------------------------------------

/// Threshold replay of a recorded scalar series: expert 0 is rewarded on
/// rounds where the value strictly exceeds the threshold, expert 1 on the
/// rest, so exactly one expert earns 1 each round.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReplaySpec {
    series: Vec<f64>,
    threshold: f64,
}

impl ThresholdReplaySpec {
    pub fn new(series: Vec<f64>, threshold: f64) -> Result<Self, EnvError> {
        if series.is_empty() {
            return Err(EnvError::EmptySeries);
        }
        if let Some(position) = series.iter().position(|v| !v.is_finite()) {
            return Err(EnvError::NonFiniteSample { position });
        }
        Ok(ThresholdReplaySpec { series, threshold })
    }

    pub fn horizon(&self) -> u64 {
        self.series.len() as u64
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn rewards(&self) -> Vec<RewardVector> {
        self.series
            .iter()
            .map(|&v| {
                let above = v > self.threshold;
                RewardVector::new(vec![
                    if above { 1.0 } else { 0.0 },
                    if above { 0.0 } else { 1.0 },
                ])
                .expect("0/1 rewards are always valid")
            })
            .collect()
    }
}

/// Validate a table of pre-built reward rows (one row per round, one entry
/// per expert). Row numbers in errors are 1-based to match source files.
pub fn replay_rewards(rows: &[Vec<f64>]) -> Result<Vec<RewardVector>, EnvError> {
    if rows.is_empty() {
        return Err(EnvError::EmptyReplay);
    }
    let expected = rows[0].len();
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != expected {
            return Err(EnvError::ReplayShapeMismatch {
                row: i + 1,
                expected,
                got: row.len(),
            });
        }
        match RewardVector::new(row.clone()) {
            Ok(r) => out.push(r),
            Err(crate::policies::PolicyError::TooFewExperts { count }) => {
                return Err(EnvError::TooFewExperts { count })
            }
            Err(crate::policies::PolicyError::RewardOutOfRange { expert, value }) => {
                return Err(EnvError::ReplayRewardOutOfRange {
                    row: i + 1,
                    expert,
                    value,
                })
            }
            Err(_) => unreachable!("reward construction only fails on size or range"),
        }
    }
    Ok(out)
}

/// A synthetic square wave: the first half of each period sits at 1.0, the
/// second half at 0.0. With a threshold of 0.5 this replays as a perfectly
/// periodic two-expert environment.
pub fn square_wave_series(period: u64, horizon: u64) -> Vec<f64> {
    assert!(period >= 2 && period % 2 == 0, "period must be even and >= 2");
    let half = period / 2;
    (0..horizon)
        .map(|i| if (i / half) % 2 == 0 { 1.0 } else { 0.0 })
        .collect()
}

// ---------------------------------------------------------------------------
// Benchmark sweep families
// ---------------------------------------------------------------------------

/// Which knob a synthetic sweep turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepKind {
    /// Reward gap between the two experts; two 800-round segments.
    Gap,
    /// Number of stationary segments of 800 rounds each, random rates.
    Shifts,
    /// Length of each of two segments with rates 0.7 / 0.5 swapped.
    SegLen,
    /// Number of experts; eight 800-round segments, random rates.
    Experts,
    /// Horizon T with sqrt(T) segments of sqrt(T) rounds, gap 0.1.
    ScaledN,
    /// Horizon T with 10 segments and gap 1/sqrt(T).
    ScaledDelta,
    /// Horizon T with sqrt(T) segments and gap 1/sqrt(T).
    ScaledBoth,
}

/// Default grid of swept values for each family.
pub fn default_grid(kind: SweepKind) -> Vec<f64> {
    match kind {
        SweepKind::Gap => vec![0.06, 0.17, 0.28, 0.39, 0.5],
        SweepKind::Shifts | SweepKind::Experts => vec![2.0, 4.0, 8.0, 16.0, 32.0],
        SweepKind::SegLen => vec![10.0, 100.0, 1000.0, 10000.0],
        SweepKind::ScaledN | SweepKind::ScaledDelta | SweepKind::ScaledBoth => {
            vec![100.0, 400.0, 1600.0, 6400.0, 25600.0]
        }
    }
}

const SWEEP_SEGMENT_LEN: u64 = 800;
const EXPERTS_SWEEP_SEGMENTS: usize = 8;
const SCALED_SHIFTS: u64 = 10;
const SCALED_GAP: f64 = 0.1;

/// Two-expert segments with rates 0.5 +- gap/2, the better expert swapping
/// every segment.
fn alternating_gap_segments(num_segments: usize, length: u64, gap: f64) -> Vec<Segment> {
    let hi = 0.5 + gap / 2.0;
    let lo = 0.5 - gap / 2.0;
    (0..num_segments)
        .map(|i| Segment {
            length,
            params: if i % 2 == 0 {
                vec![hi, lo]
            } else {
                vec![lo, hi]
            },
        })
        .collect()
}

fn random_rate_segments(
    num_segments: usize,
    length: u64,
    num_experts: usize,
    rng: &mut impl Rng,
) -> Vec<Segment> {
    (0..num_segments)
        .map(|_| Segment {
            length,
            params: (0..num_experts).map(|_| rng.random::<f64>()).collect(),
        })
        .collect()
}

fn as_count(value: f64, min: u64, reason: &'static str) -> Result<u64, EnvError> {
    if !value.is_finite() || value.fract() != 0.0 || value < min as f64 {
        return Err(EnvError::BadSweepValue { value, reason });
    }
    Ok(value as u64)
}

fn as_square(value: f64) -> Result<(u64, u64), EnvError> {
    let t = as_count(value, 4, "horizon must be an integer >= 4")?;
    let root = t.isqrt();
    if root * root != t {
        return Err(EnvError::BadSweepValue {
            value,
            reason: "horizon must be a perfect square so sqrt(T) segments fit exactly",
        });
    }
    Ok((t, root))
}

/// Build the environment for one point of a sweep. Random-rate families draw
/// their per-segment rates from `rng`; the others ignore it.
pub fn sweep_spec(
    kind: SweepKind,
    value: f64,
    rng: &mut impl Rng,
) -> Result<SegmentedBernoulliSpec, EnvError> {
    let segments = match kind {
        SweepKind::Gap => {
            if !(0.0..=1.0).contains(&value) {
                return Err(EnvError::BadSweepValue {
                    value,
                    reason: "gap must lie in [0, 1]",
                });
            }
            alternating_gap_segments(2, SWEEP_SEGMENT_LEN, value)
        }
        SweepKind::Shifts => {
            let n = as_count(value, 2, "shift count must be an integer >= 2")?;
            random_rate_segments(n as usize, SWEEP_SEGMENT_LEN, 2, rng)
        }
        SweepKind::SegLen => {
            let len = as_count(value, 1, "segment length must be an integer >= 1")?;
            vec![
                Segment {
                    length: len,
                    params: vec![0.7, 0.5],
                },
                Segment {
                    length: len,
                    params: vec![0.5, 0.7],
                },
            ]
        }
        SweepKind::Experts => {
            let k = as_count(value, 2, "expert count must be an integer >= 2")?;
            random_rate_segments(EXPERTS_SWEEP_SEGMENTS, SWEEP_SEGMENT_LEN, k as usize, rng)
        }
        SweepKind::ScaledN => {
            let (_, root) = as_square(value)?;
            alternating_gap_segments(root as usize, root, SCALED_GAP)
        }
        SweepKind::ScaledDelta => {
            let t = as_count(value, 4, "horizon must be an integer >= 4")?;
            if t % SCALED_SHIFTS != 0 {
                return Err(EnvError::BadSweepValue {
                    value,
                    reason: "horizon must be divisible by the fixed shift count of 10",
                });
            }
            let gap = 1.0 / (t as f64).sqrt();
            alternating_gap_segments(SCALED_SHIFTS as usize, t / SCALED_SHIFTS, gap)
        }
        SweepKind::ScaledBoth => {
            let (t, root) = as_square(value)?;
            let gap = 1.0 / (t as f64).sqrt();
            alternating_gap_segments(root as usize, root, gap)
        }
    };
    SegmentedBernoulliSpec::new(segments)
}

/// One point of a sweep: the swept value and its environment.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub parameter: f64,
    pub spec: SegmentedBernoulliSpec,
}

/// The full default sweep for a family.
pub fn synthetic_sweep_specs(
    kind: SweepKind,
    rng: &mut impl Rng,
) -> Result<Vec<SweepPoint>, EnvError> {
    default_grid(kind)
        .into_iter()
        .map(|parameter| {
            Ok(SweepPoint {
                parameter,
                spec: sweep_spec(kind, parameter, rng)?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

//! Regret, lift, and work accounting over completed runs.
//!
//! A run trace is the full record of one policy replication: per round, the
//! decision, the reward vector, the reward actually obtained, and the number
//! of weight updates performed. Metrics reduce traces against the
//! environment's per-segment ground truth.

use std::fmt;
use std::time::Duration;

use crate::envs::SegmentTruth;
use crate::policies::{PolicyKind, RewardVector};
use crate::dyadic::DyadicInterval;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    /// Trace length and ground-truth horizon disagree.
    HorizonMismatch { trace: u64, truth: u64 },
    /// Relative lift needs a strictly positive baseline.
    NonPositiveBaseline { baseline: f64 },
    /// Reward-difference series is defined for exactly two experts.
    NotTwoExperts { got: usize },
    /// No values to aggregate.
    EmptySample,
    /// A round's reward vector is too short for the segment's best expert.
    MissingExpert { round: u64, expert: usize },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::HorizonMismatch { trace, truth } => {
                write!(f, "trace has {trace} rounds but ground truth covers {truth}")
            }
            MetricsError::NonPositiveBaseline { baseline } => {
                write!(f, "relative lift undefined for baseline {baseline}")
            }
            MetricsError::NotTwoExperts { got } => {
                write!(f, "reward-difference series needs 2 experts, got {got}")
            }
            MetricsError::EmptySample => write!(f, "cannot aggregate an empty sample"),
            MetricsError::MissingExpert { round, expert } => {
                write!(f, "round {round} has no reward for expert {expert}")
            }
        }
    }
}

impl std::error::Error for MetricsError {}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

/// One completed round as the harness saw it.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub expert: usize,
    pub interval: Option<DyadicInterval>,
    pub rewards: RewardVector,
    /// Reward credited to the policy: the played expert's reward, or the
    /// expectation under its distribution when the trace is fractional.
    pub obtained: f64,
    /// Weight updates the policy performed for this round.
    pub updates: u64,
}

/// Full record of one policy replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub policy: PolicyKind,
    pub seed: u64,
    /// True when `obtained` is an expected reward rather than a single
    /// expert's; mixing such traces into realized-regret comparisons is the
    /// caller's deliberate choice.
    pub fractional: bool,
    pub rounds: Vec<RoundRecord>,
    /// Time spent inside choose/update only.
    pub policy_time: Duration,
    /// Time for the whole replication including environment replay.
    pub total_time: Duration,
}

impl RunTrace {
    pub fn horizon(&self) -> u64 {
        self.rounds.len() as u64
    }
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Reward the per-segment best experts collected minus reward the policy
/// collected: sum over segments i and rounds t in segment i of
/// r_t(best_i) - obtained_t.
pub fn realized_regret(trace: &RunTrace, truth: &SegmentTruth) -> Result<f64, MetricsError> {
    if trace.horizon() != truth.horizon() {
        return Err(MetricsError::HorizonMismatch {
            trace: trace.horizon(),
            truth: truth.horizon(),
        });
    }
    let mut segment = 0usize;
    let mut regret = 0.0;
    for (i, round) in trace.rounds.iter().enumerate() {
        let t = i as u64 + 1;
        while truth.entries[segment].last < t {
            segment += 1;
        }
        let best = truth.entries[segment].best;
        if best >= round.rewards.num_experts() {
            return Err(MetricsError::MissingExpert {
                round: t,
                expert: best,
            });
        }
        regret += round.rewards.get(best) - round.obtained;
    }
    Ok(regret)
}

/// Total reward the policy collected.
pub fn total_reward(trace: &RunTrace) -> f64 {
    trace.rounds.iter().map(|r| r.obtained).sum()
}

/// Improvement of `candidate` over `baseline` in percent:
/// 100 * (candidate - baseline) / baseline. Negative when the candidate is
/// worse. The baseline must be strictly positive.
pub fn relative_lift(candidate: f64, baseline: f64) -> Result<f64, MetricsError> {
    if !(baseline > 0.0) {
        return Err(MetricsError::NonPositiveBaseline { baseline });
    }
    Ok(100.0 * (candidate - baseline) / baseline)
}

/// Prefix sums of r_t(expert 0) - r_t(expert 1); positive stretches are
/// where the first expert dominates. Defined for two-expert reward streams.
pub fn cumulative_reward_diff(rewards: &[RewardVector]) -> Result<Vec<f64>, MetricsError> {
    let mut out = Vec::with_capacity(rewards.len());
    let mut acc = 0.0;
    for r in rewards {
        if r.num_experts() != 2 {
            return Err(MetricsError::NotTwoExperts {
                got: r.num_experts(),
            });
        }
        acc += r.get(0) - r.get(1);
        out.push(acc);
    }
    Ok(out)
}

/// Mean and sample standard deviation over replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationStats {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Aggregate replication values: mean and sample standard deviation (the
/// n - 1 denominator), with std defined as 0 for a single value.
pub fn aggregate(values: &[f64]) -> Result<ReplicationStats, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n == 1 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok(ReplicationStats { mean, std, n })
}

/// Per-round weight-update counts: (round, updates) in round order. For the
/// interval policy this is exactly num_experts * (floor(log2 t) + 1).
pub fn complexity_profile(trace: &RunTrace) -> Vec<(u64, u64)> {
    trace
        .rounds
        .iter()
        .enumerate()
        .map(|(i, r)| (i as u64 + 1, r.updates))
        .collect()
}

//! Expert-selection policies.
//!
//! A policy plays a repeated game against a reward environment: each round it
//! commits to an expert, then observes the full reward vector for that round
//! (full information, not bandit feedback). Three rules are provided:
//!
//! * [`FollowTheLeader`]: pick the expert with the highest cumulative reward.
//! * [`FollowTheBestInterval`]: run one leader instance per currently active
//!   dyadic interval and follow the (expert, interval) pair with the largest
//!   relative-reward weight, which lets the rule restart cheaply after the
//!   environment shifts.
//! * [`AdaNormalHedge`]: a parameter-free hedging baseline over sleeping
//!   experts with pruned lifetimes.
//!
//! Experts are indexed from 0. Rounds are 1-based and strictly alternate
//! `choose` / `update`; an `update` without a pending `choose`, or with a
//! decision other than the pending one, is rejected.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicInterval;

mod anh;
mod ftbi;
mod ftl;

pub use anh::{potential as anh_potential, AdaNormalHedge, SleepingExpert};
pub use ftbi::{FollowTheBestInterval, IntervalSlot};
pub use ftl::FollowTheLeader;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyError {
    /// Selection over fewer than two experts is vacuous.
    TooFewExperts { count: usize },
    /// Rewards live in [0, 1]; NaN is rejected too.
    RewardOutOfRange { expert: usize, value: f64 },
    /// Reward vector length does not match the policy's expert count.
    DimensionMismatch { expected: usize, got: usize },
    /// `update` called without a pending `choose`.
    OutOfTurn,
    /// The decision handed to `update` is not the one produced this round.
    DecisionMismatch,
}

impl fmt::Display for PolicyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyError::TooFewExperts { count } => {
                write!(f, "need at least 2 experts, got {count}")
            }
            PolicyError::RewardOutOfRange { expert, value } => {
                write!(f, "reward {value} for expert {expert} is outside [0, 1]")
            }
            PolicyError::DimensionMismatch { expected, got } => {
                write!(f, "reward vector has {got} entries, policy expects {expected}")
            }
            PolicyError::OutOfTurn => write!(f, "update called without a pending choose"),
            PolicyError::DecisionMismatch => {
                write!(f, "decision passed to update is not the pending one")
            }
        }
    }
}

impl std::error::Error for PolicyError {}

// ---------------------------------------------------------------------------
// Core types
// ---------------------------------------------------------------------------

/// One round's rewards, one entry per expert, each in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardVector(Vec<f64>);

impl RewardVector {
    pub fn new(rewards: Vec<f64>) -> Result<Self, PolicyError> {
        if rewards.len() < 2 {
            return Err(PolicyError::TooFewExperts {
                count: rewards.len(),
            });
        }
        for (expert, &value) in rewards.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(PolicyError::RewardOutOfRange { expert, value });
            }
        }
        Ok(RewardVector(rewards))
    }

    pub fn num_experts(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, expert: usize) -> f64 {
        self.0[expert]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// What a policy committed to for one round. `interval` is set by the
/// interval-based rule, `distribution` by randomized rules; a plain
/// deterministic rule sets neither.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub expert: usize,
    pub interval: Option<DyadicInterval>,
    pub distribution: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Ftl,
    Ftbi,
    Anh,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Ftl, PolicyKind::Ftbi, PolicyKind::Anh];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Ftl => "ftl",
            PolicyKind::Ftbi => "ftbi",
            PolicyKind::Anh => "anh",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ftl" => Ok(PolicyKind::Ftl),
            "ftbi" => Ok(PolicyKind::Ftbi),
            "anh" => Ok(PolicyKind::Anh),
            other => Err(format!("unknown policy '{other}' (expected ftl, ftbi, or anh)")),
        }
    }
}

/// How the hedging baseline turns its distribution into a commitment:
/// `Sampled` draws one expert from it, `Fractional` plays the distribution
/// itself (the obtained reward is then an expectation, which downstream
/// accounting flags).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnhMode {
    Sampled,
    Fractional,
}

impl fmt::Display for AnhMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnhMode::Sampled => "sampled",
            AnhMode::Fractional => "fractional",
        })
    }
}

impl FromStr for AnhMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sampled" => Ok(AnhMode::Sampled),
            "fractional" => Ok(AnhMode::Fractional),
            other => Err(format!(
                "unknown mode '{other}' (expected sampled or fractional)"
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Policy trait
// ---------------------------------------------------------------------------

/// The round protocol shared by every selection rule.
///
/// `choose` commits to a decision for the current round; `update` then feeds
/// back the full reward vector together with that same decision and advances
/// the round counter. Calling `choose` twice in a row panics (it is a driver
/// bug, not a recoverable condition); `update` out of turn returns an error.
pub trait Policy {
    fn kind(&self) -> PolicyKind;

    fn num_experts(&self) -> usize;

    /// The 1-based round the next `choose` will decide (equivalently, one
    /// more than the number of completed rounds).
    fn round(&self) -> u64;

    fn choose(&mut self) -> Decision;

    fn update(&mut self, rewards: &RewardVector, decision: &Decision) -> Result<(), PolicyError>;

    /// Weight-accumulator writes performed by the most recent `update`; the
    /// deterministic per-round work measure used by complexity profiles.
    fn updates_last_round(&self) -> u64;

    /// True when the obtained reward for a round is the expectation under the
    /// decision's distribution rather than a single expert's reward.
    fn fractional(&self) -> bool {
        false
    }
}

/// Fresh policy state for a given rule, expert count, and seed. The seed only
/// matters for randomized rules; deterministic ones ignore it, so equal-seed
/// reconstruction always reproduces identical state.
pub fn build_policy(
    kind: PolicyKind,
    num_experts: usize,
    seed: u64,
    anh_mode: AnhMode,
) -> Result<Box<dyn Policy>, PolicyError> {
    match kind {
        PolicyKind::Ftl => Ok(Box::new(FollowTheLeader::new(num_experts)?)),
        PolicyKind::Ftbi => Ok(Box::new(FollowTheBestInterval::new(num_experts)?)),
        PolicyKind::Anh => Ok(Box::new(AdaNormalHedge::new(num_experts, seed, anh_mode)?)),
    }
}

/// Shared argmax with ties broken toward the lowest expert index.
fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

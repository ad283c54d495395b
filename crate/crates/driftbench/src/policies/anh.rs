//! Adaptive normal hedge over sleeping experts.
//!
//! Every round spawns one sleeping expert per arm, born at that round with
//! zero accumulators. A sleeping expert born at s tracks its regret R (sum of
//! its arm's reward minus the policy's expected reward since s) and the
//! absolute counterpart C, and votes for its arm with weight
//!
//! ```text
//! w(R, C) = 1/2 * (phi(R + 1, C + 1) - phi(R - 1, C + 1)),
//! phi(R, C) = exp(max(R, 0)^2 / (3 C)).
//! ```
//!
//! The arm distribution is the normalized per-arm weight mass. Left alone the
//! population would grow linearly, so each expert is pruned after a lifetime
//! tied to the largest power of two dividing its birth round: births at odd
//! rounds are short-lived, births at highly even rounds persist, and at any
//! round only O(log t) experts per arm are alive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{argmax_lowest, AnhMode, Decision, Policy, PolicyError, PolicyKind, RewardVector};

/// Weight a sleeping expert with regret accumulators (R, C) contributes to
/// its arm.
pub fn potential(regret: f64, abs_regret: f64) -> f64 {
    0.5 * (phi(regret + 1.0, abs_regret + 1.0) - phi(regret - 1.0, abs_regret + 1.0))
}

fn phi(regret: f64, scale: f64) -> f64 {
    let clipped = regret.max(0.0);
    (clipped * clipped / (3.0 * scale)).exp()
}

/// Rounds of participation granted to an expert born at `birth`: with
/// 2^j the largest power of two dividing birth, the expert stays alive while
/// t <= birth + 2^(j + 2) + 1.
fn lifetime_of(birth: u64) -> u64 {
    debug_assert!(birth >= 1);
    (1u64 << (birth.trailing_zeros() + 2)) + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct SleepingExpert {
    pub birth: u64,
    pub arm: usize,
    pub regret: f64,
    pub abs_regret: f64,
    pub lifetime: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaNormalHedge {
    num_experts: usize,
    round: u64,
    /// Alive sleeping experts in spawn order: birth ascending, arm ascending
    /// within a birth. Summation order is therefore reproducible.
    alive: Vec<SleepingExpert>,
    rng: ChaCha8Rng,
    mode: AnhMode,
    pending: Option<Decision>,
    updates_last: u64,
}

impl AdaNormalHedge {
    pub fn new(num_experts: usize, seed: u64, mode: AnhMode) -> Result<Self, PolicyError> {
        if num_experts < 2 {
            return Err(PolicyError::TooFewExperts { count: num_experts });
        }
        let mut state = AdaNormalHedge {
            num_experts,
            round: 1,
            alive: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            mode,
            pending: None,
            updates_last: 0,
        };
        state.spawn(1);
        Ok(state)
    }

    pub fn mode(&self) -> AnhMode {
        self.mode
    }

    /// Alive sleeping experts in spawn order.
    pub fn alive(&self) -> &[SleepingExpert] {
        &self.alive
    }

    fn spawn(&mut self, birth: u64) {
        let lifetime = lifetime_of(birth);
        for arm in 0..self.num_experts {
            self.alive.push(SleepingExpert {
                birth,
                arm,
                regret: 0.0,
                abs_regret: 0.0,
                lifetime,
            });
        }
    }

    fn distribution(&self) -> Vec<f64> {
        let mut mass = vec![0.0; self.num_experts];
        for e in &self.alive {
            mass[e.arm] += potential(e.regret, e.abs_regret);
        }
        let total: f64 = mass.iter().sum();
        if total.is_finite() && total > 0.0 {
            for m in &mut mass {
                *m /= total;
            }
            mass
        } else {
            // Defensive: all weights can only vanish together, and overflow
            // would need regrets far beyond any benchmark horizon.
            vec![1.0 / self.num_experts as f64; self.num_experts]
        }
    }
}

fn sample_index(dist: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    dist.len() - 1
}

impl Policy for AdaNormalHedge {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Anh
    }

    fn num_experts(&self) -> usize {
        self.num_experts
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn choose(&mut self) -> Decision {
        assert!(
            self.pending.is_none(),
            "choose called twice without an update"
        );
        let dist = self.distribution();
        let expert = match self.mode {
            AnhMode::Sampled => sample_index(&dist, &mut self.rng),
            AnhMode::Fractional => argmax_lowest(&dist),
        };
        let decision = Decision {
            expert,
            interval: None,
            distribution: Some(dist),
        };
        self.pending = Some(decision.clone());
        decision
    }

    fn update(&mut self, rewards: &RewardVector, decision: &Decision) -> Result<(), PolicyError> {
        let pending = self.pending.as_ref().ok_or(PolicyError::OutOfTurn)?;
        if pending.expert != decision.expert || pending.interval != decision.interval {
            return Err(PolicyError::DecisionMismatch);
        }
        if rewards.num_experts() != self.num_experts {
            return Err(PolicyError::DimensionMismatch {
                expected: self.num_experts,
                got: rewards.num_experts(),
            });
        }
        let dist = pending
            .distribution
            .as_ref()
            .expect("choose always records a distribution");
        let expected: f64 = dist
            .iter()
            .zip(rewards.as_slice())
            .map(|(p, r)| p * r)
            .sum();
        for e in &mut self.alive {
            let gap = rewards.get(e.arm) - expected;
            e.regret += gap;
            e.abs_regret += gap.abs();
        }
        self.updates_last = 2 * self.alive.len() as u64;
        let t = self.round;
        self.alive.retain(|e| e.birth + e.lifetime > t);
        self.spawn(t + 1);
        self.round += 1;
        self.pending = None;
        Ok(())
    }

    fn updates_last_round(&self) -> u64 {
        self.updates_last
    }

    fn fractional(&self) -> bool {
        self.mode == AnhMode::Fractional
    }
}

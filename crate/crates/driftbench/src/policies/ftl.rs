//! Follow the leader: commit to the expert with the highest cumulative
//! reward so far, ties toward the lowest index. Strong when one expert stays
//! best forever, and the component the interval-based rule restarts.

use super::{argmax_lowest, Decision, Policy, PolicyError, PolicyKind, RewardVector};

#[derive(Debug, Clone, PartialEq)]
pub struct FollowTheLeader {
    weights: Vec<f64>,
    round: u64,
    pending: Option<Decision>,
    updates_last: u64,
}

impl FollowTheLeader {
    pub fn new(num_experts: usize) -> Result<Self, PolicyError> {
        if num_experts < 2 {
            return Err(PolicyError::TooFewExperts { count: num_experts });
        }
        Ok(FollowTheLeader {
            weights: vec![0.0; num_experts],
            round: 1,
            pending: None,
            updates_last: 0,
        })
    }

    /// Cumulative reward per expert over all completed rounds.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Policy for FollowTheLeader {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Ftl
    }

    fn num_experts(&self) -> usize {
        self.weights.len()
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn choose(&mut self) -> Decision {
        assert!(
            self.pending.is_none(),
            "choose called twice without an update"
        );
        let decision = Decision {
            expert: argmax_lowest(&self.weights),
            interval: None,
            distribution: None,
        };
        self.pending = Some(decision.clone());
        decision
    }

    fn update(&mut self, rewards: &RewardVector, decision: &Decision) -> Result<(), PolicyError> {
        let pending = self.pending.as_ref().ok_or(PolicyError::OutOfTurn)?;
        if pending.expert != decision.expert || pending.interval != decision.interval {
            return Err(PolicyError::DecisionMismatch);
        }
        if rewards.num_experts() != self.weights.len() {
            return Err(PolicyError::DimensionMismatch {
                expected: self.weights.len(),
                got: rewards.num_experts(),
            });
        }
        for (w, &r) in self.weights.iter_mut().zip(rewards.as_slice()) {
            *w += r;
        }
        self.updates_last = self.weights.len() as u64;
        self.round += 1;
        self.pending = None;
        Ok(())
    }

    fn updates_last_round(&self) -> u64 {
        self.updates_last
    }
}

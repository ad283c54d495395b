//! Follow the best interval.
//!
//! One leader instance runs over every currently active dyadic interval; the
//! policy follows the (expert, interval) pair whose relative-reward weight is
//! largest. Weights store reward relative to the expert actually played, so
//! a freshly started interval competes from zero and an expert that beats the
//! played one accumulates positive weight. When the environment shifts, some
//! recently started interval quickly notices the new best expert, which is
//! what lets the rule track changes that plain follow-the-leader misses.
//!
//! Slot bookkeeping mirrors the interval system exactly: slots whose interval
//! ends at round t are retired during that round's update, and slots for
//! intervals starting at t + 1 appear lazily at the next choose, so there are
//! never more than floor(log2 t) + 1 of them.

use crate::dyadic::{active_set, DyadicInterval};

use super::{Decision, Policy, PolicyError, PolicyKind, RewardVector};

/// One leader instance: an active interval and its per-expert weights,
/// each weight the reward accumulated relative to the played expert since
/// the interval began.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSlot {
    pub interval: DyadicInterval,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FollowTheBestInterval {
    num_experts: usize,
    round: u64,
    /// Live slots ordered by increasing level, matching the active set.
    slots: Vec<IntervalSlot>,
    pending: Option<Decision>,
    updates_last: u64,
}

impl FollowTheBestInterval {
    pub fn new(num_experts: usize) -> Result<Self, PolicyError> {
        if num_experts < 2 {
            return Err(PolicyError::TooFewExperts { count: num_experts });
        }
        Ok(FollowTheBestInterval {
            num_experts,
            round: 1,
            slots: Vec::new(),
            pending: None,
            updates_last: 0,
        })
    }

    /// Live slots, ordered by increasing level.
    pub fn slots(&self) -> &[IntervalSlot] {
        &self.slots
    }

    /// Bring the slot list in line with the active set of the current round.
    /// Slots that survived the last retirement necessarily still contain the
    /// round, so this only inserts fresh zero-weight slots for intervals that
    /// begin now.
    fn sync_slots(&mut self) {
        let active = active_set(self.round).expect("rounds are 1-based");
        let mut old = std::mem::take(&mut self.slots);
        let mut next = Vec::with_capacity(active.len());
        for interval in active {
            match old.iter().position(|s| s.interval == interval) {
                Some(i) => next.push(old.swap_remove(i)),
                None => next.push(IntervalSlot {
                    interval,
                    weights: vec![0.0; self.num_experts],
                }),
            }
        }
        debug_assert!(old.is_empty(), "live slot fell outside the active set");
        self.slots = next;
    }
}

impl Policy for FollowTheBestInterval {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Ftbi
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
        self.sync_slots();
        // Ties go to the longest interval, then the lowest expert index, so
        // scan slots from the highest level down and experts upward, keeping
        // only strict improvements.
        let mut best_expert = 0;
        let mut best_slot = self.slots.len() - 1;
        let mut best_weight = f64::NEG_INFINITY;
        for (slot_idx, slot) in self.slots.iter().enumerate().rev() {
            for (expert, &w) in slot.weights.iter().enumerate() {
                if w > best_weight {
                    best_weight = w;
                    best_expert = expert;
                    best_slot = slot_idx;
                }
            }
        }
        // A slot born this round has weight zero, so the maximum is never
        // negative.
        debug_assert!(best_weight >= 0.0);
        let decision = Decision {
            expert: best_expert,
            interval: Some(self.slots[best_slot].interval),
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
        if rewards.num_experts() != self.num_experts {
            return Err(PolicyError::DimensionMismatch {
                expected: self.num_experts,
                got: rewards.num_experts(),
            });
        }
        let played = rewards.get(decision.expert);
        for slot in &mut self.slots {
            for (w, &r) in slot.weights.iter_mut().zip(rewards.as_slice()) {
                *w += r - played;
            }
        }
        self.updates_last = (self.num_experts * self.slots.len()) as u64;
        let t = self.round;
        self.slots.retain(|s| s.interval.end() != t);
        self.round += 1;
        self.pending = None;
        Ok(())
    }

    fn updates_last_round(&self) -> u64 {
        self.updates_last
    }
}

//! Random-stream derivation.
//!
//! Replication r of an experiment with base seed S owns the replication seed
//! S + r. Within a replication, every consumer gets its own generator keyed
//! by (replication seed, grid point, stream tag): the environment draws from
//! stream 0 and each policy from its own stream, so adding or removing a
//! policy never perturbs anyone else's randomness.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::policies::PolicyKind;

/// Stream tag of the environment generator.
pub const ENV_STREAM: u64 = 0;

fn stream_of(kind: PolicyKind) -> u64 {
    match kind {
        PolicyKind::Ftl => 1,
        PolicyKind::Ftbi => 2,
        PolicyKind::Anh => 3,
    }
}

/// Generator for one (replication, grid point, stream) cell.
pub fn stream_rng(replication_seed: u64, point: u64, stream: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&replication_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&point.to_le_bytes());
    seed[16..24].copy_from_slice(&stream.to_le_bytes());
    seed[24..].copy_from_slice(b"driftbnc");
    ChaCha8Rng::from_seed(seed)
}

/// Seed handed to a policy for one (replication, grid point) cell.
pub fn policy_seed(replication_seed: u64, point: u64, kind: PolicyKind) -> u64 {
    stream_rng(replication_seed, point, stream_of(kind)).next_u64()
}

//! Online expert selection under shifting reward distributions.
//!
//! The library has three layers. `dyadic` supplies the interval algebra that
//! the interval-based forecaster is built on. `policies` implements the
//! selection rules themselves (follow-the-leader, follow-the-best-interval,
//! and an adaptive-normal-hedge baseline with sleeping experts). `envs`,
//! `ingest`, `metrics`, and `harness` wrap those in reproducible experiments:
//! seeded synthetic environments, CSV series replay, regret/lift accounting,
//! and a sweep runner that emits CSV or JSON result tables.
//!
//! Everything downstream of a fixed seed is deterministic, including the
//! bytes of emitted result files and the parallel runner's output ordering.

pub mod dyadic;
pub mod envs;
pub mod harness;
pub mod ingest;
pub mod metrics;
pub mod policies;

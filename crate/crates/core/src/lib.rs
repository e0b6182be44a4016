//! Monte Carlo simulation of early-stage venture fund returns under
//! power-law deal outcomes.
//!
//! * [`distributions`]: the raw, squashed-to-zero and bounded power laws,
//!   inverse-transform sampling and closed-form statistics.
//! * [`engine`]: deal pools, skill reweighting, portfolio draws, ticket
//!   sizing, follow-on reserves and per-fund gross multiples.
//! * [`experiments`]: cohort metrics, replicate aggregation, parameter sweeps,
//!   presets and CSV/JSON output.
//!
//! Every random draw comes from a [`RandomStream`] addressed by
//! `(seed, replicate, fund, stage)`, so results are identical for any thread
//! count.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod engine;
mod error;
pub mod experiments;
pub mod stream;

pub use distributions::{ClosedFormStats, DistributionSpec, PowerLawParams, Variant};
pub use engine::{
    DealPool, FollowOnPolicy, FundOutcome, FundSpec, Selectivity, SkillProfile, TicketPolicy,
};
pub use error::{Error, Result};
pub use experiments::{CohortMetrics, Metric, ReplicateStats, SweepPlan, SweepResult};
pub use stream::RandomStream;

/// Version stamped into sweep provenance.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

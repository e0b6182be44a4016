//! Fund construction: deal pools, portfolio draws, ticket sizing, follow-ons.
//!
//! A replicate owns one immutable [`DealPool`]. Each simulated fund draws its
//! portfolio from that pool, sizes its tickets, optionally deploys a follow-on
//! reserve and reports a gross multiple. All per-fund randomness comes from
//! substreams `(replicate, fund, stage)` so cohorts are schedule independent.

mod cohort;
mod follow_on;
mod pool;
mod portfolio;
mod tickets;
mod weights;

pub use cohort::{simulate_cohort, simulate_cohort_with_weights, FundSpec};
pub use follow_on::{fund_multiple, FollowOnPolicy, FundOutcome, Selectivity};
pub use pool::{generate_pool, DealPool};
pub use portfolio::{draw_portfolio, PortfolioSampler};
pub use tickets::{allocate_tickets, TicketPolicy, DEFAULT_QUALITY_NOISE};
pub use weights::{skill_weights, SelectionWeights, SkillProfile};

/// Stage tags: last element of a per-fund stream path.
pub mod stage {
    pub const PORTFOLIO: u64 = 0;
    pub const TICKETS: u64 = 1;
    pub const FOLLOW_ON: u64 = 2;
    /// Pool streams are `(replicate, POOL)`.
    pub const POOL: u64 = 3;
}

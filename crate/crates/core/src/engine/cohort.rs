use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::follow_on::{gross_multiple, FollowOnPolicy, Selectivity};
use super::pool::DealPool;
use super::portfolio::PortfolioSampler;
use super::stage;
use super::tickets::{allocate_into, TicketPolicy};
use super::weights::{skill_weights, SelectionWeights, SkillProfile};
use crate::error::{config_err, Result};
use crate::stream::RandomStream;

/// Everything that defines how one simulated fund invests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundSpec {
    pub portfolio_size: usize,
    pub ticket_policy: TicketPolicy,
    pub follow_on: FollowOnPolicy,
    pub skill: SkillProfile,
}

impl FundSpec {
    pub fn validate(&self) -> Result<()> {
        if self.portfolio_size == 0 {
            return Err(config_err("portfolio size must be >= 1"));
        }
        self.ticket_policy.validate()?;
        self.follow_on.validate()?;
        self.skill.validate()
    }
}

struct Scratch {
    sampler: PortfolioSampler,
    picks: Vec<usize>,
    multiples: Vec<f64>,
    fractions: Vec<f64>,
}

/// Gross multiples of `n_funds` funds drawn from `pool`, in fund order.
///
/// Fund `f` uses the substreams `stream / f / stage`, so the output does not
/// depend on how rayon schedules the work.
pub fn simulate_cohort(
    pool: &DealPool,
    fund: &FundSpec,
    n_funds: usize,
    stream: &RandomStream,
) -> Result<Vec<f64>> {
    fund.validate()?;
    let weights = skill_weights(pool, &fund.skill)?;
    simulate_cohort_with_weights(pool, &weights, fund, n_funds, stream)
}

/// [`simulate_cohort`] with precomputed selection weights, so sweeps can
/// reuse one weight table across many grid points.
pub fn simulate_cohort_with_weights(
    pool: &DealPool,
    weights: &SelectionWeights,
    fund: &FundSpec,
    n_funds: usize,
    stream: &RandomStream,
) -> Result<Vec<f64>> {
    fund.validate()?;
    if n_funds == 0 {
        return Err(config_err("n_funds must be >= 1"));
    }
    if weights.len() != pool.len() {
        return Err(config_err(format!(
            "weights cover {} deals but the pool holds {}",
            weights.len(),
            pool.len()
        )));
    }
    let n = fund.portfolio_size;
    if n > pool.len() {
        return Err(config_err(format!(
            "portfolio size {n} exceeds the pool size {}",
            pool.len()
        )));
    }
    let deals = pool.multiples();

    let out = (0..n_funds)
        .into_par_iter()
        .map_init(
            || Scratch {
                sampler: PortfolioSampler::new(pool.len()),
                picks: Vec::with_capacity(n),
                multiples: Vec::with_capacity(n),
                fractions: Vec::with_capacity(n),
            },
            |s, f| {
                let f = f as u64;
                let mut rng = stream.child_rng(f, stage::PORTFOLIO);
                s.sampler
                    .draw(weights, n, &mut rng, &mut s.picks)
                    .expect("portfolio size checked above");
                s.multiples.clear();
                s.multiples.extend(s.picks.iter().map(|&j| deals[j]));

                if fund.ticket_policy.needs_rng() {
                    let mut rng = stream.child_rng(f, stage::TICKETS);
                    allocate_into(
                        &fund.ticket_policy,
                        n,
                        Some(&s.multiples),
                        &mut rng,
                        &mut s.fractions,
                    );
                } else {
                    allocate_into(&fund.ticket_policy, n, None, &mut rng, &mut s.fractions);
                }

                let follow_on = &fund.follow_on;
                if follow_on.reserve_fraction > 0.0
                    && matches!(follow_on.selectivity, Selectivity::Selective { .. })
                {
                    rng = stream.child_rng(f, stage::FOLLOW_ON);
                }
                gross_multiple(&s.multiples, &s.fractions, follow_on, &mut rng)
            },
        )
        .collect();
    Ok(out)
}

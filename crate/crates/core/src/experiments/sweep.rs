use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{cohort_metrics, replicate_stats, CohortMetrics, ReplicateStats};
use super::plan::SweepPlan;
use crate::distributions::DistributionSpec;
use crate::engine::{
    generate_pool, simulate_cohort_with_weights, skill_weights, stage, FollowOnPolicy, FundSpec,
    Selectivity, SkillProfile, TicketPolicy,
};
use crate::error::Result;
use crate::stream::RandomStream;
use crate::ENGINE_VERSION;

/// Coordinates of one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridKey {
    #[serde(rename = "N")]
    pub portfolio_size: usize,
    /// `None` is unbounded.
    pub bound: Option<f64>,
    pub reserve_fraction: f64,
    pub skill_alpha: f64,
    pub policy: TicketPolicy,
    pub selectivity: Selectivity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(flatten)]
    pub key: GridKey,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<ReplicateStats>,
    /// Per-replicate cohort metrics, in replicate order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub replicates: Vec<CohortMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub plan: SweepPlan,
    pub engine_version: String,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub provenance: Provenance,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// The row whose key satisfies `pred`, if exactly one exists.
    pub fn find(&self, pred: impl Fn(&GridKey) -> bool) -> Option<&SweepRow> {
        let mut hits = self.rows.iter().filter(|r| pred(&r.key));
        let first = hits.next()?;
        if hits.next().is_some() {
            return None;
        }
        Some(first)
    }

    pub fn failed_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

/// Grid points in row order: N, bound, r, skill, policy, selectivity
/// (last varies fastest).
pub fn grid_keys(plan: &SweepPlan) -> Vec<GridKey> {
    let mut keys = Vec::with_capacity(plan.grid_size());
    for &portfolio_size in &plan.portfolio_sizes {
        for &bound in &plan.bounds {
            for &reserve_fraction in &plan.reserve_fractions {
                for &skill_alpha in &plan.skill_alphas {
                    for &policy in &plan.ticket_policies {
                        for &selectivity in &plan.selectivities {
                            keys.push(GridKey {
                                portfolio_size,
                                bound,
                                reserve_fraction,
                                skill_alpha,
                                policy,
                                selectivity,
                            });
                        }
                    }
                }
            }
        }
    }
    keys
}

type CellOutcome = std::result::Result<CohortMetrics, String>;

/// Runs every grid point of `plan` for every replicate.
///
/// Replicate `i` draws one pool per bound from the stream `(seed, i, POOL)`;
/// skill levels reweight that pool rather than drawing a new one. Funds use
/// `(seed, i, fund, stage)`, so grid points within a replicate share their
/// random numbers and differences between rows reflect the parameters only.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    plan.validate()?;
    let params = plan.world_params()?;
    let keys = grid_keys(plan);
    let root = RandomStream::new(plan.master_seed);
    info!(
        "sweep: {} grid points x {} replicates x {} funds",
        keys.len(),
        plan.n_replicates,
        plan.n_funds
    );

    let per_replicate: Vec<Vec<CellOutcome>> = (0..plan.n_replicates)
        .into_par_iter()
        .map(|rep| -> Result<Vec<CellOutcome>> {
            let rep_stream = root.substream(rep as u64);
            let pool_stream = rep_stream.substream(stage::POOL);
            let mut cells: Vec<Option<CellOutcome>> = vec![None; keys.len()];
            for &bound in &plan.bounds {
                let spec = DistributionSpec::squashed_with_bound(params, bound)?;
                let pool = generate_pool(&spec, plan.pool_size, &pool_stream)?;
                for &skill_alpha in &plan.skill_alphas {
                    let skill = SkillProfile::new(skill_alpha)?;
                    let weights = skill_weights(&pool, &skill)?;
                    for (cell, key) in keys.iter().enumerate() {
                        if key.bound != bound || key.skill_alpha != skill_alpha {
                            continue;
                        }
                        let fund = FundSpec {
                            portfolio_size: key.portfolio_size,
                            ticket_policy: key.policy,
                            follow_on: FollowOnPolicy {
                                reserve_fraction: key.reserve_fraction,
                                dilution_factor: plan.dilution_factor,
                                selectivity: key.selectivity,
                            },
                            skill,
                        };
                        let outcome = simulate_cohort_with_weights(
                            &pool,
                            &weights,
                            &fund,
                            plan.n_funds,
                            &rep_stream,
                        )
                        .and_then(|funds| cohort_metrics(&funds))
                        .map_err(|e| e.to_string());
                        cells[cell] = Some(outcome);
                    }
                }
            }
            debug!("replicate {rep} done");
            Ok(cells
                .into_iter()
                .map(|c| c.expect("every grid cell visited"))
                .collect())
        })
        .collect::<Result<_>>()?;

    let rows = keys
        .into_iter()
        .enumerate()
        .map(|(cell, key)| {
            let mut replicates = Vec::with_capacity(plan.n_replicates);
            let mut error = None;
            for rep in &per_replicate {
                match &rep[cell] {
                    Ok(m) => replicates.push(m.clone()),
                    Err(e) => {
                        error = Some(e.clone());
                        break;
                    }
                }
            }
            if error.is_some() {
                return SweepRow {
                    key,
                    stats: None,
                    replicates: Vec::new(),
                    error,
                };
            }
            let stats = replicate_stats(&replicates).ok();
            SweepRow {
                key,
                stats,
                replicates,
                error: None,
            }
        })
        .collect();

    Ok(SweepResult {
        provenance: Provenance {
            plan: plan.clone(),
            engine_version: ENGINE_VERSION.to_string(),
            master_seed: plan.master_seed,
        },
        rows,
    })
}

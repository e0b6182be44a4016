use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, PowerLawParams};
use crate::engine::{FollowOnPolicy, Selectivity, SkillProfile, TicketPolicy};
use crate::error::{config_err, Result};

/// Portfolio sizes simulated unless a plan says otherwise.
pub const DEFAULT_PORTFOLIO_SIZES: [usize; 17] = [
    1, 2, 3, 5, 7, 10, 15, 20, 30, 40, 50, 75, 100, 150, 200, 250, 300,
];
/// ROI caps studied for bounded worlds; `None` in a bound list is unbounded.
pub const DEFAULT_BOUNDS: [f64; 6] = [50.0, 100.0, 200.0, 300.0, 500.0, 1000.0];
pub const DEFAULT_WORLD_ALPHA: f64 = 2.05;
pub const DEFAULT_X_MIN: f64 = 0.35;
pub const DEFAULT_POOL_SIZE: usize = 60_000;
pub const DEFAULT_N_FUNDS: usize = 100_000;
pub const DEFAULT_N_REPLICATES: usize = 20;
pub const DEFAULT_SEED: u64 = 20_230_101;

/// A grid of fund configurations plus the Monte Carlo budget to spend on
/// each. Missing JSON fields take the average-world defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepPlan {
    pub portfolio_sizes: Vec<usize>,
    /// ROI caps; `null` means unbounded.
    pub bounds: Vec<Option<f64>>,
    pub reserve_fractions: Vec<f64>,
    pub world_alpha: f64,
    pub x_min: f64,
    pub skill_alphas: Vec<f64>,
    pub ticket_policies: Vec<TicketPolicy>,
    pub selectivities: Vec<Selectivity>,
    pub dilution_factor: f64,
    pub n_funds: usize,
    pub n_replicates: usize,
    pub pool_size: usize,
    pub master_seed: u64,
}

impl Default for SweepPlan {
    fn default() -> Self {
        Self {
            portfolio_sizes: DEFAULT_PORTFOLIO_SIZES.to_vec(),
            bounds: vec![None],
            reserve_fractions: vec![0.0],
            world_alpha: DEFAULT_WORLD_ALPHA,
            x_min: DEFAULT_X_MIN,
            skill_alphas: vec![DEFAULT_WORLD_ALPHA],
            ticket_policies: vec![TicketPolicy::Uniform],
            selectivities: vec![Selectivity::All],
            dilution_factor: FollowOnPolicy::DEFAULT_DILUTION,
            n_funds: DEFAULT_N_FUNDS,
            n_replicates: DEFAULT_N_REPLICATES,
            pool_size: DEFAULT_POOL_SIZE,
            master_seed: DEFAULT_SEED,
        }
    }
}

fn non_empty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(config_err(format!("{name} must not be empty")))
    } else {
        Ok(())
    }
}

impl SweepPlan {
    /// Checks every list and parameter against the engine's type invariants.
    /// Portfolio sizes larger than the pool are not an error here: those grid
    /// points are reported as failed rows by the sweep.
    pub fn validate(&self) -> Result<()> {
        non_empty("portfolio_sizes", &self.portfolio_sizes)?;
        non_empty("bounds", &self.bounds)?;
        non_empty("reserve_fractions", &self.reserve_fractions)?;
        non_empty("skill_alphas", &self.skill_alphas)?;
        non_empty("ticket_policies", &self.ticket_policies)?;
        non_empty("selectivities", &self.selectivities)?;

        let params = self.world_params()?;
        for &bound in &self.bounds {
            DistributionSpec::squashed_with_bound(params, bound)?;
        }
        if self.portfolio_sizes.contains(&0) {
            return Err(config_err("portfolio sizes must be >= 1"));
        }
        for &alpha in &self.skill_alphas {
            SkillProfile::new(alpha)?;
        }
        for policy in &self.ticket_policies {
            policy.validate()?;
        }
        for &reserve_fraction in &self.reserve_fractions {
            for &selectivity in &self.selectivities {
                FollowOnPolicy {
                    reserve_fraction,
                    dilution_factor: self.dilution_factor,
                    selectivity,
                }
                .validate()?;
            }
        }
        if self.n_funds == 0 {
            return Err(config_err("n_funds must be >= 1"));
        }
        if self.n_replicates == 0 {
            return Err(config_err("n_replicates must be >= 1"));
        }
        if self.pool_size == 0 {
            return Err(config_err("pool_size must be >= 1"));
        }
        Ok(())
    }

    pub fn world_params(&self) -> Result<PowerLawParams> {
        PowerLawParams::new_squashable(self.world_alpha, self.x_min)
    }

    /// Number of grid points (rows) the plan expands to.
    pub fn grid_size(&self) -> usize {
        self.portfolio_sizes.len()
            * self.bounds.len()
            * self.reserve_fractions.len()
            * self.skill_alphas.len()
            * self.ticket_policies.len()
            * self.selectivities.len()
    }
}

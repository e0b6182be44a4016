use serde::Serialize;

use super::metrics::Metric;
use super::sweep::{GridKey, SweepResult};
use crate::engine::{Selectivity, TicketPolicy};
use crate::error::{config_err, Result};

/// Which slice of a sweep to lay out as a reserve-fraction × portfolio-size
/// grid. Axes left `None` must have a single value in the plan.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapQuery {
    pub metric: Metric,
    pub bound: Option<f64>,
    pub skill_alpha: Option<f64>,
    pub policy: Option<TicketPolicy>,
    pub selectivity: Option<Selectivity>,
}

impl HeatmapQuery {
    pub fn new(metric: Metric, bound: Option<f64>) -> Self {
        Self {
            metric,
            bound,
            skill_alpha: None,
            policy: None,
            selectivity: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Heatmap {
    pub metric: Metric,
    pub bound: Option<f64>,
    /// Reserve fractions, one per row.
    pub reserve_fractions: Vec<f64>,
    /// Portfolio sizes, one per column.
    pub portfolio_sizes: Vec<usize>,
    /// Replicate means; `None` where the grid point failed.
    pub values: Vec<Vec<Option<f64>>>,
}

impl Heatmap {
    pub fn cell(&self, reserve_fraction: f64, portfolio_size: usize) -> Option<f64> {
        let i = self.reserve_fractions.iter().position(|&r| r == reserve_fraction)?;
        let j = self.portfolio_sizes.iter().position(|&n| n == portfolio_size)?;
        self.values[i][j]
    }
}

fn pick_axis<T: Copy + PartialEq + std::fmt::Debug>(
    name: &str,
    requested: Option<T>,
    available: &[T],
) -> Result<T> {
    match requested {
        Some(v) if available.contains(&v) => Ok(v),
        Some(v) => Err(config_err(format!(
            "{name} {v:?} is not part of the sweep (available: {available:?})"
        ))),
        None if available.len() == 1 => Ok(available[0]),
        None => Err(config_err(format!(
            "{name} must be specified: the sweep has {available:?}"
        ))),
    }
}

pub fn heatmap(result: &SweepResult, query: &HeatmapQuery) -> Result<Heatmap> {
    let plan = &result.provenance.plan;
    if !plan.bounds.contains(&query.bound) {
        return Err(config_err(format!(
            "bound {:?} is not part of the sweep (available: {:?})",
            query.bound, plan.bounds
        )));
    }
    let skill = pick_axis("skill_alpha", query.skill_alpha, &plan.skill_alphas)?;
    let policy = pick_axis("policy", query.policy, &plan.ticket_policies)?;
    let selectivity = pick_axis("selectivity", query.selectivity, &plan.selectivities)?;
    if plan.reserve_fractions.is_empty() || plan.portfolio_sizes.is_empty() {
        return Err(config_err("sweep has no reserve-fraction or portfolio-size axis"));
    }

    let matches = |k: &GridKey, r: f64, n: usize| {
        k.portfolio_size == n
            && k.reserve_fraction == r
            && k.bound == query.bound
            && k.skill_alpha == skill
            && k.policy == policy
            && k.selectivity == selectivity
    };
    let values = plan
        .reserve_fractions
        .iter()
        .map(|&r| {
            plan.portfolio_sizes
                .iter()
                .map(|&n| {
                    result
                        .rows
                        .iter()
                        .find(|row| matches(&row.key, r, n))
                        .and_then(|row| row.stats.as_ref())
                        .map(|s| s.mean(query.metric))
                })
                .collect()
        })
        .collect();

    Ok(Heatmap {
        metric: query.metric,
        bound: query.bound,
        reserve_fractions: plan.reserve_fractions.clone(),
        portfolio_sizes: plan.portfolio_sizes.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run_sweep, SweepPlan};

    fn plan() -> SweepPlan {
        SweepPlan {
            portfolio_sizes: vec![2, 8, 30],
            reserve_fractions: vec![0.0, 0.5],
            bounds: vec![None, Some(50.0)],
            n_funds: 2000,
            n_replicates: 2,
            pool_size: 3000,
            ..SweepPlan::default()
        }
    }

    #[test]
    fn single_cell() {
        let p = SweepPlan {
            portfolio_sizes: vec![10],
            n_funds: 200,
            n_replicates: 1,
            pool_size: 500,
            ..SweepPlan::default()
        };
        let r = run_sweep(&p).unwrap();
        let h = heatmap(&r, &HeatmapQuery::new(Metric::PLoss, None)).unwrap();
        assert_eq!(h.values.len(), 1);
        assert_eq!(h.values[0].len(), 1);
        assert_eq!(
            h.values[0][0].unwrap(),
            r.rows[0].stats.as_ref().unwrap().mean(Metric::PLoss)
        );
    }

    #[test]
    fn dimensions_and_reserve_effect() {
        let r = run_sweep(&plan()).unwrap();
        let h = heatmap(&r, &HeatmapQuery::new(Metric::Freq(2), None)).unwrap();
        assert_eq!(h.values.len(), 2);
        assert!(h.values.iter().all(|row| row.len() == 3));
        for n in [2, 8, 30] {
            assert!(h.cell(0.0, n).unwrap() >= h.cell(0.5, n).unwrap());
        }
    }

    #[test]
    fn missing_axes_rejected() {
        let r = run_sweep(&plan()).unwrap();
        assert!(heatmap(&r, &HeatmapQuery::new(Metric::PLoss, Some(100.0))).is_err());
        let mut q = HeatmapQuery::new(Metric::PLoss, None);
        q.skill_alpha = Some(1.85);
        assert!(heatmap(&r, &q).is_err());
    }
}

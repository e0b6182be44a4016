//! Named plans for the standard scenarios.

use super::plan::{SweepPlan, DEFAULT_BOUNDS};
use crate::engine::{Selectivity, TicketPolicy, DEFAULT_QUALITY_NOISE};
use crate::error::{config_err, Result};

pub const OVERPERFORMER_ALPHA: f64 = 1.85;
pub const UNDERPERFORMER_ALPHA: f64 = 2.5;
pub const BAD_WORLD_ALPHA: f64 = 2.3;
pub const GOOD_WORLD_ALPHA: f64 = 1.85;

/// `(name, description)` for every preset, in listing order.
pub const PRESETS: &[(&str, &str)] = &[
    ("average_world", "alpha 2.05, x_min 0.35, unbounded, uniform tickets, no follow-ons"),
    ("overperformer", "manager picks follow alpha 1.85 in the average world, all ROI bounds"),
    ("underperformer", "manager picks follow alpha 2.5 in the average world"),
    ("bad_world", "world alpha 2.3: more 0-1x outcomes"),
    ("bad_world_overperformer", "world alpha 2.3, manager picks follow alpha 2.05"),
    ("good_world", "world alpha 1.85: fewer 0-1x outcomes"),
    ("bounds_grid", "ROI bounds 50, 100, 200, 300, 500, 1000 and unbounded"),
    ("tickets_random", "random ticket sizes with max/min ratio 10, all ROI bounds"),
    ("tickets_quality", "tickets proportional to noisy deal quality, ratio 2, all ROI bounds"),
    ("follow_on_grid", "reserve fraction 0..0.9 at 3x dilution, all ROI bounds"),
    ("follow_on_selective", "reserve grid with follow-ons on 70% of <1x and 90% of >=1x deals"),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _)| *name).collect()
}

fn all_bounds() -> Vec<Option<f64>> {
    DEFAULT_BOUNDS
        .iter()
        .map(|&b| Some(b))
        .chain(std::iter::once(None))
        .collect()
}

fn reserve_grid() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 10.0).collect()
}

pub fn preset(name: &str) -> Result<SweepPlan> {
    let base = SweepPlan::default();
    let plan = match name {
        "average_world" => base,
        "overperformer" => SweepPlan {
            skill_alphas: vec![OVERPERFORMER_ALPHA],
            bounds: all_bounds(),
            ..base
        },
        "underperformer" => SweepPlan {
            skill_alphas: vec![UNDERPERFORMER_ALPHA],
            ..base
        },
        "bad_world" => SweepPlan {
            world_alpha: BAD_WORLD_ALPHA,
            skill_alphas: vec![BAD_WORLD_ALPHA],
            ..base
        },
        "bad_world_overperformer" => SweepPlan {
            world_alpha: BAD_WORLD_ALPHA,
            skill_alphas: vec![2.05],
            ..base
        },
        "good_world" => SweepPlan {
            world_alpha: GOOD_WORLD_ALPHA,
            skill_alphas: vec![GOOD_WORLD_ALPHA],
            ..base
        },
        "bounds_grid" => SweepPlan {
            bounds: all_bounds(),
            ..base
        },
        "tickets_random" => SweepPlan {
            ticket_policies: vec![TicketPolicy::RandomRatio { max_min_ratio: 10.0 }],
            bounds: all_bounds(),
            ..base
        },
        "tickets_quality" => SweepPlan {
            ticket_policies: vec![TicketPolicy::QualityProportional {
                max_min_ratio: 2.0,
                noise_halfwidth: DEFAULT_QUALITY_NOISE,
            }],
            bounds: all_bounds(),
            ..base
        },
        "follow_on_grid" => SweepPlan {
            reserve_fractions: reserve_grid(),
            bounds: all_bounds(),
            ..base
        },
        "follow_on_selective" => SweepPlan {
            reserve_fractions: reserve_grid(),
            bounds: all_bounds(),
            selectivities: vec![Selectivity::Selective {
                p_follow_low: 0.7,
                p_follow_high: 0.9,
            }],
            ..base
        },
        other => {
            return Err(config_err(format!(
                "unknown preset {other:?}; valid presets: {}",
                preset_names().join(", ")
            )))
        }
    };
    Ok(plan)
}

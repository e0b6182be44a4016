use rand::distr::Distribution;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use serde::{Deserialize, Serialize};

use super::pool::DealPool;
use crate::distributions::{Variant, ALPHA_EPSILON};
use crate::error::{config_err, Result};

/// Manager skill: the power-law exponent the manager's picks follow. Lower
/// than the world's exponent means better-than-average selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkillProfile {
    pub effective_alpha: f64,
}

impl SkillProfile {
    pub fn new(effective_alpha: f64) -> Result<Self> {
        let skill = Self { effective_alpha };
        skill.validate()?;
        Ok(skill)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.effective_alpha > 1.0 + ALPHA_EPSILON) || !self.effective_alpha.is_finite() {
            return Err(config_err(format!(
                "skill alpha must be finite and > 1 (got {})",
                self.effective_alpha
            )));
        }
        Ok(())
    }
}

/// Selection probabilities over a pool.
#[derive(Debug, Clone)]
pub enum SelectionWeights {
    Uniform { len: usize },
    Weighted {
        weights: Vec<f64>,
        alias: WeightedAliasIndex<f64>,
    },
}

impl SelectionWeights {
    pub fn uniform(len: usize) -> Self {
        SelectionWeights::Uniform { len }
    }

    /// Normalises `weights` to sum 1. Equal weights collapse to
    /// [`SelectionWeights::Uniform`].
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(config_err("weights must be non-empty"));
        }
        if let Some(bad) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(config_err(format!(
                "weights must be finite and > 0 (got {bad})"
            )));
        }
        let first = weights[0];
        if weights.iter().all(|&w| w == first) {
            return Ok(SelectionWeights::Uniform { len: weights.len() });
        }
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
        let alias = WeightedAliasIndex::new(weights.clone())
            .map_err(|e| config_err(format!("cannot build alias table: {e}")))?;
        Ok(SelectionWeights::Weighted { weights, alias })
    }

    pub fn len(&self) -> usize {
        match self {
            SelectionWeights::Uniform { len } => *len,
            SelectionWeights::Weighted { weights, .. } => weights.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, SelectionWeights::Uniform { .. })
    }

    /// Normalised weight of index `j`.
    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        match self {
            SelectionWeights::Uniform { len } => 1.0 / *len as f64,
            SelectionWeights::Weighted { weights, .. } => weights[j],
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.weight(j)).collect()
    }

    /// One index drawn with probability proportional to its weight.
    #[inline]
    pub(crate) fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            SelectionWeights::Uniform { len } => rng.random_range(0..*len),
            SelectionWeights::Weighted { alias, .. } => alias.sample(rng),
        }
    }
}

/// Log-density of the pool's law (squashed form for the squashed and
/// bounded variants) up to the constant factor `(1 - x_min)` on `[0, 1)`,
/// which cancels in every ratio taken below.
fn log_density_kernel(variant: Variant, alpha: f64, x_min: f64, x: f64) -> f64 {
    let z = match variant {
        Variant::Raw => x,
        // Clamped values sit on the tail branch, which is what the bounded
        // density reads just below `x_max`.
        Variant::SquashedToZero | Variant::Bounded { .. } if x < 1.0 => (1.0 - x_min) * x + x_min,
        Variant::SquashedToZero | Variant::Bounded { .. } => x,
    };
    (alpha - 1.0).ln() - alpha * (z / x_min).ln()
}

/// Reweights the world's pool so that picks follow the manager's exponent:
/// `w_j ∝ f_skill(x_j) / f_world(x_j)`.
pub fn skill_weights(pool: &DealPool, skill: &SkillProfile) -> Result<SelectionWeights> {
    skill.validate()?;
    let spec = pool.spec();
    let world_alpha = spec.params().alpha();
    if skill.effective_alpha == world_alpha {
        return Ok(SelectionWeights::uniform(pool.len()));
    }
    let x_min = spec.params().x_min();
    let variant = spec.variant();
    let mut logs: Vec<f64> = pool
        .multiples()
        .iter()
        .map(|&x| {
            log_density_kernel(variant, skill.effective_alpha, x_min, x)
                - log_density_kernel(variant, world_alpha, x_min, x)
        })
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for l in logs.iter_mut() {
        *l = (*l - max).exp().max(f64::MIN_POSITIVE);
    }
    SelectionWeights::from_weights(logs)
}

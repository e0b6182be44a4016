use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Which portfolio companies receive follow-on capital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selectivity {
    All,
    /// Deals ending below 1x are followed with probability `p_follow_low`,
    /// the rest with `p_follow_high`.
    Selective {
        p_follow_low: f64,
        p_follow_high: f64,
    },
}

impl fmt::Display for Selectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selectivity::All => write!(f, "all"),
            Selectivity::Selective {
                p_follow_low,
                p_follow_high,
            } => write!(f, "selective:{p_follow_low}:{p_follow_high}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FollowOnPolicy {
    /// Share of the whole fund held back for follow-ons.
    pub reserve_fraction: f64,
    /// Follow-on entry price relative to the initial round.
    pub dilution_factor: f64,
    pub selectivity: Selectivity,
}

impl Default for FollowOnPolicy {
    fn default() -> Self {
        Self::none()
    }
}

impl FollowOnPolicy {
    pub const DEFAULT_DILUTION: f64 = 3.0;

    /// No reserve: every dollar goes into initial tickets.
    pub fn none() -> Self {
        Self {
            reserve_fraction: 0.0,
            dilution_factor: Self::DEFAULT_DILUTION,
            selectivity: Selectivity::All,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.reserve_fraction) {
            return Err(config_err(format!(
                "reserve_fraction must lie in [0, 1) (got {})",
                self.reserve_fraction
            )));
        }
        if !(self.dilution_factor > 0.0) || !self.dilution_factor.is_finite() {
            return Err(config_err(format!(
                "dilution_factor must be finite and > 0 (got {})",
                self.dilution_factor
            )));
        }
        if let Selectivity::Selective {
            p_follow_low,
            p_follow_high,
        } = self.selectivity
        {
            for (name, p) in [("p_follow_low", p_follow_low), ("p_follow_high", p_follow_high)] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(config_err(format!("{name} must lie in [0, 1] (got {p})")));
                }
            }
        }
        Ok(())
    }
}

/// Gross multiple (TVPI before fees) of one simulated fund.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundOutcome {
    pub gross_multiple: f64,
}

/// Fund multiple from per-deal multiples, initial fractions and follow-on policy.
pub fn fund_multiple<R: Rng + ?Sized>(
    deal_multiples: &[f64],
    fractions: &[f64],
    policy: &FollowOnPolicy,
    rng: &mut R,
) -> Result<FundOutcome> {
    policy.validate()?;
    if deal_multiples.is_empty() || deal_multiples.len() != fractions.len() {
        return Err(config_err(format!(
            "need one fraction per deal (got {} deals, {} fractions)",
            deal_multiples.len(),
            fractions.len()
        )));
    }
    Ok(FundOutcome {
        gross_multiple: gross_multiple(deal_multiples, fractions, policy, rng),
    })
}

/// Unchecked core of [`fund_multiple`]. Draws from `rng` only for selective
/// follow-ons with a non-zero reserve.
#[inline]
pub(crate) fn gross_multiple<R: Rng + ?Sized>(
    deal_multiples: &[f64],
    fractions: &[f64],
    policy: &FollowOnPolicy,
    rng: &mut R,
) -> f64 {
    let r = policy.reserve_fraction;
    let initial_share = 1.0 - r;
    let mut total = 0.0;
    for (&m, &f) in deal_multiples.iter().zip(fractions) {
        total += initial_share * f * m;
    }
    if r == 0.0 {
        return total;
    }

    let (followed, followed_sum) = match policy.selectivity {
        Selectivity::All => (deal_multiples.len(), deal_multiples.iter().sum::<f64>()),
        Selectivity::Selective {
            p_follow_low,
            p_follow_high,
        } => {
            let mut count = 0usize;
            let mut sum = 0.0;
            for &m in deal_multiples {
                let p = if m < 1.0 { p_follow_low } else { p_follow_high };
                if rng.random::<f64>() < p {
                    count += 1;
                    sum += m;
                }
            }
            (count, sum)
        }
    };
    if followed == 0 {
        // Undeployed reserve is returned as cash.
        return total + r;
    }
    let per_deal = r / followed as f64;
    total + per_deal * followed_sum / policy.dilution_factor
}

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Half-width of the multiplicative noise on quality estimates.
pub const DEFAULT_QUALITY_NOISE: f64 = 0.25;

/// How a fund sizes its initial tickets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TicketPolicy {
    /// Every deal gets `1/N` of the fund.
    Uniform,
    /// Raw weights uniform on `[1, max_min_ratio]`.
    RandomRatio { max_min_ratio: f64 },
    /// Raw weights affine in a noisy estimate of each deal's multiple, from 1
    /// for the worst estimate to `max_min_ratio` for the best.
    QualityProportional {
        max_min_ratio: f64,
        #[serde(default = "default_noise")]
        noise_halfwidth: f64,
    },
}

fn default_noise() -> f64 {
    DEFAULT_QUALITY_NOISE
}

impl TicketPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TicketPolicy::Uniform => Ok(()),
            TicketPolicy::RandomRatio { max_min_ratio } => check_ratio(max_min_ratio),
            TicketPolicy::QualityProportional {
                max_min_ratio,
                noise_halfwidth,
            } => {
                check_ratio(max_min_ratio)?;
                if !(0.0..1.0).contains(&noise_halfwidth) {
                    return Err(config_err(format!(
                        "noise_halfwidth must lie in [0, 1) (got {noise_halfwidth})"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn needs_quality(&self) -> bool {
        matches!(self, TicketPolicy::QualityProportional { .. })
    }

    pub fn needs_rng(&self) -> bool {
        !matches!(self, TicketPolicy::Uniform)
    }
}

impl fmt::Display for TicketPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TicketPolicy::Uniform => write!(f, "uniform"),
            TicketPolicy::RandomRatio { max_min_ratio } => write!(f, "random_ratio:{max_min_ratio}"),
            TicketPolicy::QualityProportional {
                max_min_ratio,
                noise_halfwidth,
            } => write!(f, "quality:{max_min_ratio}:{noise_halfwidth}"),
        }
    }
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(ratio >= 1.0) || !ratio.is_finite() {
        return Err(config_err(format!(
            "max_min_ratio must be finite and >= 1 (got {ratio})"
        )));
    }
    Ok(())
}

/// Capital fractions for `n` deals, summing to one.
pub fn allocate_tickets<R: Rng + ?Sized>(
    policy: &TicketPolicy,
    n: usize,
    quality_estimates: Option<&[f64]>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    policy.validate()?;
    if n == 0 {
        return Err(config_err("cannot allocate tickets to an empty portfolio"));
    }
    if policy.needs_quality() {
        match quality_estimates {
            None => {
                return Err(config_err(
                    "quality-proportional tickets need quality estimates",
                ))
            }
            Some(q) if q.len() != n => {
                return Err(config_err(format!(
                    "expected {n} quality estimates, got {}",
                    q.len()
                )))
            }
            _ => {}
        }
    }
    let mut out = Vec::with_capacity(n);
    allocate_into(policy, n, quality_estimates, rng, &mut out);
    Ok(out)
}

/// Unchecked core of [`allocate_tickets`].
pub(crate) fn allocate_into<R: Rng + ?Sized>(
    policy: &TicketPolicy,
    n: usize,
    quality_estimates: Option<&[f64]>,
    rng: &mut R,
    out: &mut Vec<f64>,
) {
    out.clear();
    match *policy {
        TicketPolicy::Uniform => {
            out.resize(n, 1.0 / n as f64);
        }
        TicketPolicy::RandomRatio { max_min_ratio } => {
            out.extend((0..n).map(|_| {
                let u: f64 = rng.random();
                (1.0 + (max_min_ratio - 1.0) * u).min(max_min_ratio)
            }));
        }
        TicketPolicy::QualityProportional {
            max_min_ratio,
            noise_halfwidth,
        } => {
            let q = quality_estimates.unwrap_or(&[]);
            out.extend(q.iter().map(|&m| {
                let u: f64 = rng.random();
                m * (1.0 + noise_halfwidth * (2.0 * u - 1.0))
            }));
            let lo = out.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = out.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            for w in out.iter_mut() {
                *w = if span > 0.0 && span.is_finite() {
                    (1.0 + (max_min_ratio - 1.0) * ((*w - lo) / span)).clamp(1.0, max_min_ratio)
                } else {
                    1.0
                };
            }
        }
    }
    if !matches!(policy, TicketPolicy::Uniform) {
        let total: f64 = out.iter().sum();
        for w in out.iter_mut() {
            *w /= total;
        }
    }
    close_to_one(out);
}

/// Replaces the last fraction so the sequential sum is exactly one.
fn close_to_one(fractions: &mut [f64]) {
    if let Some((last, head)) = fractions.split_last_mut() {
        let partial: f64 = head.iter().sum();
        *last = 1.0 - partial;
    }
}

//! Power-law return distributions.
//!
//! Three variants share one parameterisation ([`PowerLawParams`]):
//!
//! * [`Variant::Raw`]: density `(α-1)/x_min · (x/x_min)^-α` on `[x_min, ∞)`.
//! * [`Variant::SquashedToZero`]: the raw law with `[x_min, 1)` rescaled onto
//!   `[0, 1)`, so total write-offs return exactly zero. The density jumps at 1.
//! * [`Variant::Bounded`]: the squashed law with every value above `x_max`
//!   collapsed onto a point mass at `x_max`.
//!
//! Sampling is exact inverse transform, one uniform per draw.

mod stats;

pub use stats::{closed_form_stats, ClosedFormStats, Extended};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, domain_err, Result};
use crate::stream::RandomStream;

/// Smallest admissible distance of `alpha` above 1.
pub const ALPHA_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawParams {
    alpha: f64,
    x_min: f64,
}

impl PowerLawParams {
    pub fn new(alpha: f64, x_min: f64) -> Result<Self> {
        if !(alpha > 1.0 + ALPHA_EPSILON) || !alpha.is_finite() {
            return Err(config_err(format!(
                "alpha must be finite and > 1 (got {alpha})"
            )));
        }
        if !(x_min > 0.0) || !x_min.is_finite() {
            return Err(config_err(format!(
                "x_min must be finite and > 0 (got {x_min})"
            )));
        }
        Ok(Self { alpha, x_min })
    }

    /// Parameters usable by the squashed and bounded variants, whose
    /// rescaling of `[x_min, 1)` onto `[0, 1)` needs `x_min < 1`.
    pub fn new_squashable(alpha: f64, x_min: f64) -> Result<Self> {
        let params = Self::new(alpha, x_min)?;
        params.check_squashable()?;
        Ok(params)
    }

    fn check_squashable(&self) -> Result<()> {
        if self.x_min < 1.0 {
            Ok(())
        } else {
            Err(config_err(format!(
                "x_min must lie in (0, 1) for the squashed variants (got {})",
                self.x_min
            )))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Raw,
    SquashedToZero,
    Bounded { x_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    params: PowerLawParams,
    variant: Variant,
}

impl DistributionSpec {
    pub fn new(params: PowerLawParams, variant: Variant) -> Result<Self> {
        match variant {
            Variant::Raw => {}
            Variant::SquashedToZero => params.check_squashable()?,
            Variant::Bounded { x_max } => {
                params.check_squashable()?;
                check_bound(x_max)?;
            }
        }
        Ok(Self { params, variant })
    }

    pub fn raw(params: PowerLawParams) -> Self {
        Self {
            params,
            variant: Variant::Raw,
        }
    }

    pub fn squashed(params: PowerLawParams) -> Result<Self> {
        Self::new(params, Variant::SquashedToZero)
    }

    pub fn bounded(params: PowerLawParams, x_max: f64) -> Result<Self> {
        Self::new(params, Variant::Bounded { x_max })
    }

    /// Squashed when `bound` is `None`, bounded otherwise.
    pub fn squashed_with_bound(params: PowerLawParams, bound: Option<f64>) -> Result<Self> {
        match bound {
            None => Self::squashed(params),
            Some(x_max) => Self::bounded(params, x_max),
        }
    }

    pub fn params(&self) -> PowerLawParams {
        self.params
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn x_max(&self) -> Option<f64> {
        match self.variant {
            Variant::Bounded { x_max } => Some(x_max),
            _ => None,
        }
    }

    /// Density of the continuous part. For `Bounded` this is zero above
    /// `x_max`; the point mass itself is reported by [`point_mass_at_bound`].
    pub fn pdf(&self, x: f64) -> Result<f64> {
        match self.variant {
            Variant::Raw => pdf_raw(self.params, x),
            Variant::SquashedToZero => pdf_squashed(self.params, x),
            Variant::Bounded { x_max } => {
                if x >= x_max {
                    if x.is_nan() {
                        return Err(domain_err("x is NaN"));
                    }
                    Ok(0.0)
                } else {
                    pdf_squashed(self.params, x)
                }
            }
        }
    }

    /// `P[X <= x]`. For `Bounded` this jumps to 1 at `x_max`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self.variant {
            Variant::Raw => cdf_raw(self.params, x),
            Variant::SquashedToZero => cdf_squashed(self.params, x),
            Variant::Bounded { x_max } => {
                if x >= x_max {
                    Ok(1.0)
                } else {
                    cdf_squashed(self.params, x)
                }
            }
        }
    }
}

fn check_bound(x_max: f64) -> Result<()> {
    if !(x_max > 1.0) {
        return Err(config_err(format!(
            "x_max must be > 1 (got {x_max})"
        )));
    }
    Ok(())
}

pub fn pdf_raw(params: PowerLawParams, x: f64) -> Result<f64> {
    let PowerLawParams { alpha, x_min } = params;
    if !(x >= x_min) {
        return Err(domain_err(format!(
            "x = {x} is below the support minimum {x_min}"
        )));
    }
    Ok((alpha - 1.0) / x_min * (x / x_min).powf(-alpha))
}

pub fn cdf_raw(params: PowerLawParams, x: f64) -> Result<f64> {
    let PowerLawParams { alpha, x_min } = params;
    if !(x >= x_min) {
        return Err(domain_err(format!(
            "x = {x} is below the support minimum {x_min}"
        )));
    }
    Ok(1.0 - (x / x_min).powf(1.0 - alpha))
}

/// Inverse of [`cdf_raw`].
pub fn quantile_raw(params: PowerLawParams, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(domain_err(format!("u = {u} is outside [0, 1)")));
    }
    Ok(raw_inverse(params, u))
}

#[inline]
fn raw_inverse(params: PowerLawParams, u: f64) -> f64 {
    params.x_min * (1.0 - u).powf(-1.0 / (params.alpha - 1.0))
}

pub fn pdf_squashed(params: PowerLawParams, x: f64) -> Result<f64> {
    let PowerLawParams { alpha, x_min } = params;
    params.check_squashable()?;
    if !(x >= 0.0) {
        return Err(domain_err(format!("x = {x} is negative")));
    }
    if x < 1.0 {
        let y = (1.0 - x_min) * x + x_min;
        Ok((1.0 - x_min) * (alpha - 1.0) / x_min * (y / x_min).powf(-alpha))
    } else {
        pdf_raw(params, x)
    }
}

pub fn cdf_squashed(params: PowerLawParams, x: f64) -> Result<f64> {
    let x_min = params.x_min;
    params.check_squashable()?;
    if !(x >= 0.0) {
        return Err(domain_err(format!("x = {x} is negative")));
    }
    if x < 1.0 {
        cdf_raw(params, (1.0 - x_min) * x + x_min)
    } else {
        cdf_raw(params, x)
    }
}

/// Probability mass collected at `x_max` by the bounded variant:
/// `(x_max / x_min)^(1-α)`.
pub fn point_mass_at_bound(params: PowerLawParams, x_max: f64) -> Result<f64> {
    if !(x_max > 1.0) {
        return Err(domain_err(format!("x_max must be > 1 (got {x_max})")));
    }
    Ok((x_max / params.x_min).powf(1.0 - params.alpha))
}

/// Maps one uniform in `[0, 1)` to a draw from `spec`.
#[inline]
pub fn transform_uniform(spec: &DistributionSpec, u: f64) -> f64 {
    let raw = raw_inverse(spec.params, u);
    match spec.variant {
        Variant::Raw => raw,
        Variant::SquashedToZero => squash(spec.params.x_min, raw),
        Variant::Bounded { x_max } => squash(spec.params.x_min, raw).min(x_max),
    }
}

#[inline]
fn squash(x_min: f64, x: f64) -> f64 {
    if x < 1.0 {
        (x - x_min) / (1.0 - x_min)
    } else {
        x
    }
}

/// One draw using the caller's generator.
#[inline]
pub fn sample_one<R: Rng + ?Sized>(spec: &DistributionSpec, rng: &mut R) -> f64 {
    transform_uniform(spec, rng.random::<f64>())
}

/// `n` independent draws from the stream's generator.
pub fn sample(spec: &DistributionSpec, stream: &RandomStream, n: usize) -> Vec<f64> {
    let mut rng = stream.rng();
    (0..n).map(|_| sample_one(spec, &mut rng)).collect()
}

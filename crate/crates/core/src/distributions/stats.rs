use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::PowerLawParams;

/// A moment that may diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }
}

/// Analytic statistics of the raw power law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormStats {
    pub params: PowerLawParams,
    pub mean: Extended,
    pub median: f64,
    pub moment_order: u32,
    pub moment_value: Extended,
    /// Exponent of `n` in the growth of the expected sample maximum.
    pub max_scaling_exponent: f64,
}

/// Mean, median, `k`-th moment and expected-maximum exponent.
///
/// The mean diverges for `α <= 2` and the `k`-th moment for `k >= α - 1`.
/// `k = 0` is treated as `k = 1`.
pub fn closed_form_stats(params: PowerLawParams, k: u32) -> ClosedFormStats {
    let alpha = params.alpha();
    let x_min = params.x_min();
    let k = k.max(1);

    let mean = if alpha > 2.0 {
        Extended::Finite((alpha - 1.0) / (alpha - 2.0) * x_min)
    } else {
        Extended::Infinite
    };
    let kf = f64::from(k);
    let moment_value = if kf < alpha - 1.0 {
        Extended::Finite((alpha - 1.0) / (alpha - kf - 1.0) * x_min.powi(k as i32))
    } else {
        Extended::Infinite
    };

    ClosedFormStats {
        params,
        mean,
        median: 2f64.powf(1.0 / (alpha - 1.0)) * x_min,
        moment_order: k,
        moment_value,
        max_scaling_exponent: 1.0 / (alpha - 1.0),
    }
}

impl Serialize for ClosedFormStats {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ClosedFormStats", 9)?;
        s.serialize_field("alpha", &self.params.alpha())?;
        s.serialize_field("x_min", &self.params.x_min())?;
        s.serialize_field("mean", &self.mean.finite())?;
        s.serialize_field("mean_finite", &self.mean.is_finite())?;
        s.serialize_field("median", &self.median)?;
        s.serialize_field("moment_k", &self.moment_order)?;
        s.serialize_field("moment_value", &self.moment_value.finite())?;
        s.serialize_field("moment_finite", &self.moment_value.is_finite())?;
        s.serialize_field("max_exponent", &self.max_scaling_exponent)?;
        s.end()
    }
}

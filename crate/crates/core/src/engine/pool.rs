use serde::{Deserialize, Serialize};

use crate::distributions::{sample, DistributionSpec};
use crate::error::{config_err, Result};
use crate::stream::RandomStream;

/// One replicate's universe of investable deals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DealPool {
    multiples: Vec<f64>,
    spec: DistributionSpec,
    stream: Option<RandomStream>,
}

impl DealPool {
    /// Pool from explicit multiples, checked against `spec`'s support.
    pub fn from_multiples(spec: DistributionSpec, multiples: Vec<f64>) -> Result<Self> {
        if multiples.is_empty() {
            return Err(config_err("deal pool must hold at least one deal"));
        }
        if let Some(bad) = multiples.iter().find(|m| !(**m >= 0.0) || !m.is_finite()) {
            return Err(config_err(format!(
                "deal multiples must be finite and >= 0 (got {bad})"
            )));
        }
        if let Some(x_max) = spec.x_max() {
            if let Some(bad) = multiples.iter().find(|m| **m > x_max) {
                return Err(config_err(format!(
                    "deal multiple {bad} exceeds the bound {x_max}"
                )));
            }
        }
        Ok(Self {
            multiples,
            spec,
            stream: None,
        })
    }

    pub fn multiples(&self) -> &[f64] {
        &self.multiples
    }

    pub fn len(&self) -> usize {
        self.multiples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multiples.is_empty()
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    /// The stream the pool was drawn from, if it was generated.
    pub fn stream(&self) -> Option<&RandomStream> {
        self.stream.as_ref()
    }

    pub fn mean(&self) -> f64 {
        self.multiples.iter().sum::<f64>() / self.multiples.len() as f64
    }
}

pub fn generate_pool(spec: &DistributionSpec, size: usize, stream: &RandomStream) -> Result<DealPool> {
    if size == 0 {
        return Err(config_err("pool size must be >= 1"));
    }
    Ok(DealPool {
        multiples: sample(spec, stream, size),
        spec: *spec,
        stream: Some(stream.clone()),
    })
}

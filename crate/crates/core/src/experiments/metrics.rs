use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest and largest fund-multiple thresholds tracked by `freq_kx`.
pub const FREQ_K_MIN: u32 = 2;
pub const FREQ_K_MAX: u32 = 10;

/// Risk/return summary of one cohort of simulated funds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortMetrics {
    /// Fraction of funds returning strictly less than 1x.
    pub p_loss: f64,
    pub min_return: f64,
    pub max_return: f64,
    pub mean_return: f64,
    /// `k -> P[multiple >= k]` for k in 2..=10.
    pub freq_kx: BTreeMap<u32, f64>,
}

impl CohortMetrics {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::PLoss => self.p_loss,
            Metric::MinReturn => self.min_return,
            Metric::MaxReturn => self.max_return,
            Metric::MeanReturn => self.mean_return,
            Metric::Freq(k) => self.freq_kx.get(&k).copied().unwrap_or(0.0),
        }
    }
}

pub fn cohort_metrics(multiples: &[f64]) -> Result<CohortMetrics> {
    if multiples.is_empty() {
        return Err(Error::Input("cannot summarise an empty cohort".into()));
    }
    let n = multiples.len() as f64;
    let mut losses = 0usize;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    // at_least[k] counts multiples whose integer part is exactly k (k capped at 10)
    let mut floor_hist = [0usize; FREQ_K_MAX as usize + 1];
    for &m in multiples {
        if m < 1.0 {
            losses += 1;
        }
        min = min.min(m);
        max = max.max(m);
        sum += m;
        let bucket = if m >= FREQ_K_MAX as f64 {
            FREQ_K_MAX as usize
        } else if m > 0.0 {
            m.floor() as usize
        } else {
            0
        };
        floor_hist[bucket] += 1;
    }
    let mut freq_kx = BTreeMap::new();
    let mut at_least = 0usize;
    for k in (FREQ_K_MIN..=FREQ_K_MAX).rev() {
        at_least += floor_hist[k as usize];
        freq_kx.insert(k, at_least as f64 / n);
    }
    // Guard the ordering invariant against rounding in the running sum.
    let mean_return = (sum / n).clamp(min, max);
    Ok(CohortMetrics {
        p_loss: losses as f64 / n,
        min_return: min,
        max_return: max,
        mean_return,
        freq_kx,
    })
}

/// Summary statistic selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Metric {
    PLoss,
    MinReturn,
    MaxReturn,
    MeanReturn,
    /// `P[multiple >= k]`.
    Freq(u32),
}

impl Metric {
    /// Every metric, in CSV order.
    pub fn all() -> Vec<Metric> {
        let mut v = vec![
            Metric::PLoss,
            Metric::MinReturn,
            Metric::MaxReturn,
            Metric::MeanReturn,
        ];
        v.extend((FREQ_K_MIN..=FREQ_K_MAX).map(Metric::Freq));
        v
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::PLoss => write!(f, "p_loss"),
            Metric::MinReturn => write!(f, "min_return"),
            Metric::MaxReturn => write!(f, "max_return"),
            Metric::MeanReturn => write!(f, "mean_return"),
            Metric::Freq(k) => write!(f, "freq_{k}x"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p_loss" => Ok(Metric::PLoss),
            "min_return" => Ok(Metric::MinReturn),
            "max_return" => Ok(Metric::MaxReturn),
            "mean_return" => Ok(Metric::MeanReturn),
            _ => s
                .strip_prefix("freq_")
                .and_then(|rest| rest.strip_suffix('x'))
                .and_then(|k| k.parse::<u32>().ok())
                .filter(|k| (FREQ_K_MIN..=FREQ_K_MAX).contains(k))
                .map(Metric::Freq)
                .ok_or_else(|| Error::Config(format!("unknown metric {s:?}"))),
        }
    }
}

impl TryFrom<String> for Metric {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Metric> for String {
    fn from(m: Metric) -> String {
        m.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStat {
    pub metric: Metric,
    pub mean: f64,
    pub std: f64,
}

/// Mean and population standard deviation of each metric across replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateStats {
    pub n_replicates: usize,
    pub metrics: Vec<MetricStat>,
}

impl ReplicateStats {
    pub fn get(&self, metric: Metric) -> Option<&MetricStat> {
        self.metrics.iter().find(|s| s.metric == metric)
    }

    pub fn mean(&self, metric: Metric) -> f64 {
        self.get(metric).map(|s| s.mean).unwrap_or(f64::NAN)
    }

    pub fn std(&self, metric: Metric) -> f64 {
        self.get(metric).map(|s| s.std).unwrap_or(f64::NAN)
    }
}

pub fn replicate_stats(metrics: &[CohortMetrics]) -> Result<ReplicateStats> {
    if metrics.is_empty() {
        return Err(Error::Input("need at least one replicate".into()));
    }
    let n = metrics.len() as f64;
    let stats = Metric::all()
        .into_iter()
        .map(|metric| {
            // Shift by the first replicate so identical inputs give exactly
            // zero spread and their own value as the mean.
            let origin = metrics[0].get(metric);
            let shift = metrics.iter().map(|m| m.get(metric) - origin).sum::<f64>() / n;
            let var = metrics
                .iter()
                .map(|m| (m.get(metric) - origin - shift).powi(2))
                .sum::<f64>()
                / n;
            MetricStat {
                metric,
                mean: origin + shift,
                std: var.sqrt(),
            }
        })
        .collect();
    Ok(ReplicateStats {
        n_replicates: metrics.len(),
        metrics: stats,
    })
}

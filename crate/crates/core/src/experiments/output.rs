//! Text encodings of sweep results.

use std::io::Write;

use super::metrics::Metric;
use super::sweep::SweepResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "N",
    "bound",
    "r",
    "skill_alpha",
    "policy",
    "selectivity",
    "metric",
    "mean",
    "std",
];

/// Formats `v` with ten significant digits.
pub fn format_sig10(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan" } else if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.9e}")
    }
}

fn bound_label(bound: Option<f64>) -> String {
    match bound {
        Some(b) => format_sig10(b),
        None => "inf".to_string(),
    }
}

/// One row per (grid point, metric). Failed grid points produce a single
/// `error` row with the message in place of the statistics.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Input(format!("csv write failed: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    let metrics = Metric::all();
    for row in &result.rows {
        let k = &row.key;
        let prefix = [
            k.portfolio_size.to_string(),
            bound_label(k.bound),
            format_sig10(k.reserve_fraction),
            format_sig10(k.skill_alpha),
            k.policy.to_string(),
            k.selectivity.to_string(),
        ];
        match (&row.stats, &row.error) {
            (Some(stats), _) => {
                for &m in &metrics {
                    let mut rec = prefix.to_vec();
                    rec.push(m.to_string());
                    rec.push(format_sig10(stats.mean(m)));
                    rec.push(format_sig10(stats.std(m)));
                    w.write_record(&rec).map_err(io)?;
                }
            }
            (None, err) => {
                let mut rec = prefix.to_vec();
                rec.push(format!("error: {}", err.as_deref().unwrap_or("no statistics")));
                rec.push(String::new());
                rec.push(String::new());
                w.write_record(&rec).map_err(io)?;
            }
        }
    }
    w.flush()
        .map_err(|e| Error::Input(format!("csv flush failed: {e}")))?;
    Ok(())
}

pub fn to_csv_string(result: &SweepResult) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(result, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Input(e.to_string()))
}

/// Nested plan + rows.
pub fn to_json_string(result: &SweepResult) -> Result<String> {
    serde_json::to_string_pretty(result).map_err(|e| Error::Input(format!("json encode failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run_sweep, SweepPlan};

    #[test]
    fn sig10() {
        assert_eq!(format_sig10(0.565), "0.5650000000");
        assert_eq!(format_sig10(1.05), "1.050000000");
        assert_eq!(format_sig10(100.0), "100.0000000");
        assert_eq!(format_sig10(0.0), "0");
        assert_eq!(format_sig10(1.0 / 3.0), "0.3333333333");
        assert_eq!(format_sig10(12345678901.0), "1.234567890e10");
        assert_eq!(format_sig10(f64::INFINITY), "inf");
        for v in [0.123456789012, 98765.4321, 3.0e-7, 42.0] {
            let back: f64 = format_sig10(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_layout() {
        let plan = SweepPlan {
            portfolio_sizes: vec![3, 500],
            n_funds: 100,
            n_replicates: 1,
            pool_size: 200,
            ..SweepPlan::default()
        };
        let r = run_sweep(&plan).unwrap();
        let text = to_csv_string(&r).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "N,bound,r,skill_alpha,policy,selectivity,metric,mean,std");
        let body: Vec<&str> = lines.collect();
        assert_eq!(body.len(), Metric::all().len() + 1);
        assert!(body[0].starts_with("3,inf,0,2.050000000,uniform,all,p_loss,"));
        let last = body.last().unwrap();
        assert!(last.starts_with("500,inf,0,2.050000000,uniform,all,"), "{last}");
        assert!(last.contains("error: "), "{last}");

        let json: serde_json::Value = serde_json::from_str(&to_json_string(&r).unwrap()).unwrap();
        assert_eq!(json["provenance"]["plan"]["portfolio_sizes"][1], 500);
        assert_eq!(json["rows"][0]["N"], 3);
        assert!(json["rows"][0]["bound"].is_null());
    }
}

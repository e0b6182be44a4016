//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fundsim_core::distributions::{pdf_raw, point_mass_at_bound, DistributionSpec, PowerLawParams, Variant};

/// Two-sided KS distance between a sample and a CDF that may jump.
/// `cdf_left(x)` is `P[X < x]`; runs of tied draws are compared at both
/// ends of the jump.
pub fn ks_statistic(
    samples: &mut [f64],
    cdf: impl Fn(f64) -> f64,
    cdf_left: impl Fn(f64) -> f64,
) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < samples.len() {
        let x = samples[i];
        let mut j = i + 1;
        while j < samples.len() && samples[j] == x {
            j += 1;
        }
        d = d.max((cdf_left(x) - i as f64 / n).abs());
        d = d.max((j as f64 / n - cdf(x)).abs());
        i = j;
    }
    d
}

pub fn ks_against(spec: &DistributionSpec, samples: &mut [f64]) -> f64 {
    let x_max = spec.x_max();
    ks_statistic(
        samples,
        |x| spec.cdf(x).unwrap(),
        |x| match x_max {
            Some(m) if x >= m => 1.0 - point_mass_at_bound(spec.params(), m).unwrap(),
            _ => spec.cdf(x).unwrap(),
        },
    )
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// `∫ pdf` over `[lo, hi]` with `lo > 0`, substituting `x = lo·e^t` so the
/// power-law tail becomes a gentle exponential in `t`.
fn log_quad(pdf: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let t_max = (hi / lo).ln();
    let panels = ((t_max * 4000.0) as usize).max(2000);
    simpson(
        |t| {
            let x = lo * t.exp();
            pdf(x) * x
        },
        0.0,
        t_max,
        panels,
    )
}

/// Total probability of `spec` by quadrature (plus the point mass, if any).
pub fn total_probability(spec: &DistributionSpec) -> f64 {
    let pdf = |x: f64| spec.pdf(x).unwrap();
    // e^60 pushes the neglected tail below 1e-25 for every alpha used here.
    let far = 60f64.exp();
    // The squashed density jumps at 1; integrate the lower piece up to 1^-.
    let below_one = 1.0 - f64::EPSILON / 2.0;
    match spec.variant() {
        Variant::Raw => log_quad(&pdf, spec.params().x_min(), spec.params().x_min() * far),
        Variant::SquashedToZero => simpson(pdf, 0.0, below_one, 20_000) + log_quad(&pdf, 1.0, far),
        Variant::Bounded { x_max } => {
            simpson(pdf, 0.0, below_one, 20_000)
                + log_quad(&pdf, 1.0, x_max)
                + point_mass_at_bound(spec.params(), x_max).unwrap()
        }
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact distribution of an equal-ticket, follow-all fund over every
/// equally likely portfolio of size `n` from `pool`.
pub fn enumerate_uniform_fund(pool: &[f64], n: usize, reserve: f64, dilution: f64) -> Vec<(f64, f64)> {
    let subsets = combinations(pool.len(), n);
    let p = 1.0 / subsets.len() as f64;
    subsets
        .iter()
        .map(|s| {
            let avg = s.iter().map(|&j| pool[j]).sum::<f64>() / n as f64;
            ((1.0 - reserve) * avg + reserve * avg / dilution, p)
        })
        .collect()
}

/// Total-variation distance between an exact discrete law and a sample.
/// Sample values are matched to the nearest support point within `tol`;
/// anything unmatched counts fully against the sample.
pub fn tv_distance(exact: &[(f64, f64)], sample: &[f64], tol: f64) -> f64 {
    let mut support: Vec<f64> = exact.iter().map(|e| e.0).collect();
    support.sort_by(|a, b| a.total_cmp(b));
    support.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let bin = |x: f64| -> Option<usize> {
        let i = support.partition_point(|&s| s < x - tol);
        (i < support.len() && (support[i] - x).abs() <= tol).then_some(i)
    };
    let mut want: BTreeMap<usize, f64> = BTreeMap::new();
    for &(x, p) in exact {
        *want.entry(bin(x).expect("support point")).or_default() += p;
    }
    let mut got: BTreeMap<usize, f64> = BTreeMap::new();
    let mut stray = 0.0;
    let w = 1.0 / sample.len() as f64;
    for &x in sample {
        match bin(x) {
            Some(i) => *got.entry(i).or_default() += w,
            None => stray += w,
        }
    }
    let diff: f64 = (0..support.len())
        .map(|i| (want.get(&i).copied().unwrap_or(0.0) - got.get(&i).copied().unwrap_or(0.0)).abs())
        .sum();
    0.5 * (diff + stray)
}

/// Least-squares slope of `ys` on `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `E[X^k]` of the raw law by quadrature up to `X`, plus the exact
/// pure-power tail `X^{k+1}·pdf(X)/(α-1-k)` beyond it. Only meaningful for
/// `k < α - 1`.
pub fn raw_moment_quadrature(params: PowerLawParams, k: u32) -> f64 {
    let pdf = |x: f64| pdf_raw(params, x).unwrap();
    let lo = params.x_min();
    let hi = lo * 1e6;
    let body = log_quad(&|x: f64| x.powi(k as i32) * pdf(x), lo, hi);
    let tail = hi.powi(k as i32 + 1) * pdf(hi) / (params.alpha() - 1.0 - f64::from(k));
    body + tail
}

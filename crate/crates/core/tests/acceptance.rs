//! Exit-gate checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail. Full Monte Carlo budgets: run with optimisations.

mod common;

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use fundsim_core::distributions::{
    cdf_raw, closed_form_stats, point_mass_at_bound, sample, DistributionSpec, Extended,
    PowerLawParams,
};
use fundsim_core::engine::{
    fund_multiple, generate_pool, simulate_cohort, FollowOnPolicy, FundSpec, SkillProfile,
    TicketPolicy,
};
use fundsim_core::experiments::{
    run_sweep, to_csv_string, Metric, SweepPlan, SweepResult, DEFAULT_PORTFOLIO_SIZES,
};
use fundsim_core::{RandomStream, Selectivity};

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Accumulates sub-results; the criterion passes only if all of them do.
#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn expect(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn finish(self) -> Check {
        if self.failures.is_empty() {
            Check::new(true, self.notes.join("; "))
        } else {
            Check::new(false, self.failures.join("; "))
        }
    }
}

fn world() -> PowerLawParams {
    PowerLawParams::new(2.05, 0.35).unwrap()
}

fn paper_plan() -> SweepPlan {
    SweepPlan::default()
}

fn mean_at(r: &SweepResult, metric: Metric, pred: impl Fn(&fundsim_core::experiments::GridKey) -> bool) -> f64 {
    r.find(pred)
        .and_then(|row| row.stats.as_ref())
        .map(|s| s.mean(metric))
        .unwrap_or(f64::NAN)
}

fn average_world() -> &'static SweepResult {
    static CELL: OnceLock<SweepResult> = OnceLock::new();
    CELL.get_or_init(|| run_sweep(&paper_plan()).unwrap())
}

fn random_ratio_sweep() -> &'static SweepResult {
    static CELL: OnceLock<SweepResult> = OnceLock::new();
    CELL.get_or_init(|| {
        run_sweep(&SweepPlan {
            portfolio_sizes: vec![10, 300],
            ticket_policies: vec![TicketPolicy::RandomRatio { max_min_ratio: 10.0 }],
            ..paper_plan()
        })
        .unwrap()
    })
}

fn closed_form() -> Check {
    let mut t = Tally::default();
    let mut cases = 0;
    for alpha in [1.85, 2.05, 2.3, 2.5, 3.5] {
        for x_min in [0.35, 1.0] {
            let p = PowerLawParams::new(alpha, x_min).unwrap();
            for k in [1u32, 2, 3] {
                cases += 1;
                let s = closed_form_stats(p, k);
                let tag = format!("α={alpha} x_min={x_min} k={k}");
                let mean_ok = match s.mean {
                    Extended::Finite(m) => alpha > 2.0 && m == (alpha - 1.0) / (alpha - 2.0) * x_min,
                    Extended::Infinite => alpha <= 2.0,
                };
                let kf = f64::from(k);
                let moment_ok = match s.moment_value {
                    Extended::Finite(m) => {
                        let quad = common::raw_moment_quadrature(p, k);
                        kf < alpha - 1.0
                            && m == (alpha - 1.0) / (alpha - kf - 1.0) * x_min.powi(k as i32)
                            && (quad / m - 1.0).abs() < 1e-6
                    }
                    Extended::Infinite => kf >= alpha - 1.0,
                };
                let median_ok = s.median == 2f64.powf(1.0 / (alpha - 1.0)) * x_min
                    && (cdf_raw(p, s.median).unwrap() - 0.5).abs() < 1e-12;
                let exp_ok = s.max_scaling_exponent == 1.0 / (alpha - 1.0);
                if !(mean_ok && moment_ok && median_ok && exp_ok) {
                    t.expect(false, format!("{tag}: {s:?}"));
                }
            }
        }
    }
    let exp = closed_form_stats(world(), 1).max_scaling_exponent;
    t.expect((exp - 0.9524).abs() < 1e-4, format!("{cases} grid cases exact, α=2.05 max exponent {exp:.4}"));
    t.finish()
}

fn distribution_fidelity() -> Check {
    let mut t = Tally::default();
    let specs = [
        DistributionSpec::raw(world()),
        DistributionSpec::squashed(world()).unwrap(),
        DistributionSpec::bounded(world(), 100.0).unwrap(),
    ];
    for (i, spec) in specs.iter().enumerate() {
        let mut xs = sample(spec, &RandomStream::with_path(101, &[i as u64]), 1_000_000);
        let at_cap = xs.iter().filter(|&&x| Some(x) == spec.x_max()).count() as f64 / xs.len() as f64;
        let d = common::ks_against(spec, &mut xs);
        let name = format!("{:?}", spec.variant());
        t.expect(d < 0.002, format!("{name} KS {d:.5}"));
        let total = common::total_probability(spec);
        t.expect((total - 1.0).abs() < 1e-6, format!("{name} mass {total:.9}"));
        if spec.x_max().is_some() {
            t.expect((at_cap - 0.00264).abs() < 0.0005, format!("point mass {at_cap:.5}"));
            let exact = point_mass_at_bound(world(), 100.0).unwrap();
            t.expect((exact - 0.00264).abs() < 0.0005, format!("exact point mass {exact:.5}"));
        }
    }
    t.finish()
}

fn min_return_by_size() -> Check {
    let mut t = Tally::default();
    let uniform = average_world();
    let random = random_ratio_sweep();
    for (label, r, n, want, tol) in [
        ("uniform", uniform, 10, 0.0935, 0.03),
        ("uniform", uniform, 100, 0.565, 0.05),
        ("uniform", uniform, 300, 0.839, 0.05),
        ("random_ratio:10", random, 10, 0.077, 0.03),
        ("random_ratio:10", random, 300, 0.7995, 0.05),
    ] {
        let got = mean_at(r, Metric::MinReturn, |k| k.portfolio_size == n);
        t.expect((got - want).abs() <= tol, format!("{label} N={n} min {got:.4} (want {want}±{tol})"));
    }
    t.finish()
}

fn loss_claims() -> Check {
    let mut t = Tally::default();
    let r = average_world();
    for (n, floor) in [(100, 0.50), (300, 0.75)] {
        let row = r.find(|k| k.portfolio_size == n).unwrap();
        let worst = row.replicates.iter().map(|m| m.min_return).fold(f64::INFINITY, f64::min);
        t.expect(worst >= floor, format!("N={n} worst fund {worst:.4} (>= {floor})"));
    }
    let p = mean_at(r, Metric::PLoss, |k| k.portfolio_size == 250);
    t.expect(p < 0.02, format!("N=250 p_loss {p:.5}"));
    t.finish()
}

fn monotonicity() -> Check {
    let mut t = Tally::default();
    let r = average_world();
    let series = |metric| -> Vec<f64> {
        DEFAULT_PORTFOLIO_SIZES
            .iter()
            .map(|&n| mean_at(r, metric, |k| k.portfolio_size == n))
            .collect()
    };
    let p_loss = series(Metric::PLoss);
    let min_ret = series(Metric::MinReturn);
    let worst_up = p_loss.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let worst_down = min_ret.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
    t.expect(worst_up <= 0.01, format!("largest p_loss rise {worst_up:.4}"));
    t.expect(worst_down <= 0.01, format!("largest min_return drop {worst_down:.4}"));

    let skills = run_sweep(&SweepPlan {
        portfolio_sizes: vec![50, 100, 200],
        skill_alphas: vec![1.85, 2.05, 2.5],
        ..paper_plan()
    })
    .unwrap();
    for n in [50, 100, 200] {
        let at = |a: f64| mean_at(&skills, Metric::PLoss, |k| k.portfolio_size == n && k.skill_alpha == a);
        let (good, avg, bad) = (at(1.85), at(2.05), at(2.5));
        t.expect(
            good <= avg + 0.005 && avg <= bad + 0.005,
            format!("N={n} p_loss {good:.4} <= {avg:.4} <= {bad:.4}"),
        );
    }
    t.finish()
}

fn follow_on_direction() -> Check {
    let mut t = Tally::default();
    let reserves = [0.0, 0.2, 0.5, 0.9];
    let r = run_sweep(&SweepPlan {
        portfolio_sizes: vec![100],
        reserve_fractions: reserves.to_vec(),
        ..paper_plan()
    })
    .unwrap();
    let at = |m, x: f64| mean_at(&r, m, |k| k.reserve_fraction == x);
    let loss: Vec<f64> = reserves.iter().map(|&x| at(Metric::PLoss, x)).collect();
    let twice: Vec<f64> = reserves.iter().map(|&x| at(Metric::Freq(2), x)).collect();
    t.expect(
        loss.windows(2).all(|w| w[1] >= w[0] - 0.01),
        format!("p_loss over r {loss:.4?}"),
    );
    t.expect(
        twice.windows(2).all(|w| w[1] <= w[0] + 0.01),
        format!("freq_2x over r {twice:.4?}"),
    );

    // r = 0 must not depend on any follow-on setting.
    let spec = DistributionSpec::squashed(world()).unwrap();
    let pool = generate_pool(&spec, 60_000, &RandomStream::new(7)).unwrap();
    let base = FundSpec {
        portfolio_size: 100,
        ticket_policy: TicketPolicy::Uniform,
        follow_on: FollowOnPolicy::none(),
        skill: SkillProfile::new(2.05).unwrap(),
    };
    let selective = FundSpec {
        follow_on: FollowOnPolicy {
            reserve_fraction: 0.0,
            dilution_factor: 5.0,
            selectivity: Selectivity::Selective {
                p_follow_low: 0.7,
                p_follow_high: 0.9,
            },
        },
        ..base
    };
    let s = RandomStream::new(8);
    let a = simulate_cohort(&pool, &base, 20_000, &s).unwrap();
    let b = simulate_cohort(&pool, &selective, 20_000, &s).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let deals = [0.0, 0.4, 3.0, 27.5];
    let fractions = [0.25; 4];
    let plain: f64 = deals.iter().zip(&fractions).fold(0.0, |acc, (m, f)| acc + f * m);
    let direct = fund_multiple(&deals, &fractions, &selective.follow_on, &mut s.rng()).unwrap();
    t.expect(
        bits(&a) == bits(&b) && direct.gross_multiple.to_bits() == plain.to_bits(),
        "r=0 bit-identical to the no-follow-on path".into(),
    );
    t.finish()
}

fn bound_effect() -> Check {
    let r = run_sweep(&SweepPlan {
        bounds: vec![Some(50.0)],
        ..paper_plan()
    })
    .unwrap();
    let series: Vec<(usize, f64)> = DEFAULT_PORTFOLIO_SIZES
        .iter()
        .map(|&n| (n, mean_at(&r, Metric::Freq(2), |k| k.portfolio_size == n)))
        .collect();
    let (arg, best) = series
        .iter()
        .copied()
        .fold((0, f64::NEG_INFINITY), |acc, (n, v)| if v > acc.1 { (n, v) } else { acc });
    let last = series.last().unwrap().1;
    Check::new(
        arg <= 75 && last < best,
        format!("freq_2x peaks at N={arg} ({best:.4}); N=300 gives {last:.4}"),
    )
}

fn brute_force() -> Check {
    let mut t = Tally::default();
    let spec = DistributionSpec::squashed(world()).unwrap();
    let mut worst: f64 = 0.0;
    let mut configs = 0;
    for p in 1..=6usize {
        let pool = generate_pool(&spec, p, &RandomStream::with_path(201, &[p as u64])).unwrap();
        for n in 1..=p.min(3) {
            for r in [0.0, 0.5] {
                configs += 1;
                let fund = FundSpec {
                    portfolio_size: n,
                    ticket_policy: TicketPolicy::Uniform,
                    follow_on: FollowOnPolicy {
                        reserve_fraction: r,
                        ..FollowOnPolicy::none()
                    },
                    skill: SkillProfile::new(2.05).unwrap(),
                };
                let stream = RandomStream::with_path(202, &[p as u64, n as u64, r.to_bits()]);
                let got = simulate_cohort(&pool, &fund, 100_000, &stream).unwrap();
                let exact = common::enumerate_uniform_fund(pool.multiples(), n, r, fund.follow_on.dilution_factor);
                let tv = common::tv_distance(&exact, &got, 1e-9);
                worst = worst.max(tv);
                if tv >= 0.01 {
                    t.expect(false, format!("P={p} N={n} r={r}: TV {tv:.4}"));
                }
            }
        }
    }
    t.expect(true, format!("{configs} configurations, worst TV {worst:.4}"));
    t.finish()
}

fn determinism() -> Check {
    let plan = SweepPlan {
        portfolio_sizes: vec![1, 10, 50],
        bounds: vec![None, Some(100.0)],
        reserve_fractions: vec![0.0, 0.5],
        skill_alphas: vec![1.85, 2.05],
        ticket_policies: vec![
            TicketPolicy::Uniform,
            TicketPolicy::RandomRatio { max_min_ratio: 10.0 },
            TicketPolicy::QualityProportional {
                max_min_ratio: 2.0,
                noise_halfwidth: 0.25,
            },
        ],
        selectivities: vec![
            Selectivity::All,
            Selectivity::Selective {
                p_follow_low: 0.7,
                p_follow_high: 0.9,
            },
        ],
        n_funds: 2_000,
        n_replicates: 3,
        pool_size: 10_000,
        ..paper_plan()
    };
    let max_threads = std::thread::available_parallelism().map_or(1, |n| n.get()).max(4);
    let csv = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| to_csv_string(&run_sweep(&plan).unwrap()).unwrap())
    };
    let one = csv(1);
    let many = csv(max_threads);
    Check::new(
        one == many,
        format!("{} CSV bytes, 1 vs {max_threads} threads", one.len()),
    )
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("closed-form statistics", closed_form),
        ("distribution fidelity", distribution_fidelity),
        ("minimum return by portfolio size", min_return_by_size),
        ("worst-fund and loss claims", loss_claims),
        ("monotonicity", monotonicity),
        ("follow-on direction", follow_on_direction),
        ("bound effect", bound_effect),
        ("small-instance brute force", brute_force),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let check = run();
        let verdict = if check.pass { "PASS" } else { "FAIL" };
        if !check.pass {
            failed += 1;
        }
        println!("{verdict} {name} [{:.1}s]: {}", start.elapsed().as_secs_f64(), check.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

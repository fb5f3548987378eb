//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use jamharvest::solvers::oracle::linspace;
use jamharvest::{
    capacity, capacity_tau_derivative, grid_step_slack, neutralization_feasible, p_threshold,
    sample_channels, sir_sweep, solve_ne, solve_nj, verify_saddle_point, ChannelGains, GridSizes,
    SweepConfig, SweepRecord, SystemParams, TauProfile, TAU_MAX,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZETAS: [f64; 4] = [0.2, 0.5, 0.8, 1.0];
const SIRS_DB: [f64; 4] = [-30.0, -10.0, 0.0, 10.0];

/// Sampled channel gains with efficiency and SIR picked from small sets.
fn random_instances(seed: u64, count: usize) -> Vec<(ChannelGains, SystemParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count as u64)
        .map(|i| {
            let gains = sample_channels(seed, i);
            let zeta = ZETAS[rng.random_range(0..ZETAS.len())];
            let sir_db = SIRS_DB[rng.random_range(0..SIRS_DB.len())];
            (gains, SystemParams { zeta, ..SystemParams::reference(sir_db) })
        })
        .collect()
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn criterion_1() -> Outcome {
    let config = SweepConfig {
        fixed_gains: Some(ChannelGains::new(0.2, 0.2, 1.0).unwrap()),
        ..SweepConfig::reference(1, 0)
    };
    let records = sir_sweep(&config).unwrap();
    let nonzero = records.iter().filter(|r| r.c_nj != 0.0).count();
    Outcome::new(
        records.len() == 41 && nonzero == 0,
        format!("{} SIR points, {nonzero} with C^NJ != 0", records.len()),
    )
}

fn criterion_2() -> Outcome {
    let gains = ChannelGains::new(1.0, 1.0, 0.2).unwrap();
    let params = SystemParams::reference(10.0);
    let base = solve_nj(&gains, &params).unwrap();
    let doubled = solve_nj(&gains, &params.with_p_max(2.0 * params.p_max)).unwrap();
    let dp = (base.profile.legit.p - doubled.profile.legit.p).abs();
    let dtau = (base.profile.legit.tau - doubled.profile.legit.tau).abs();
    Outcome::new(
        base.feasible && dp <= 1e-9 && dtau <= 1e-9,
        format!("regime {} -> {}, |dp| = {dp:e}, |dtau| = {dtau:e}", base.regime, doubled.regime),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for (gains, params) in random_instances(3, 1000) {
        let margin = solve_ne(&gains, &params).unwrap().value - solve_nj(&gains, &params).unwrap().value;
        worst = worst.min(margin);
        failures += usize::from(margin < -1e-9);
    }
    Outcome::new(failures == 0, format!("1000 sets, {failures} below -1e-9, worst margin {worst:e}"))
}

/// Sets shared by the saddle-point and deviation criteria.
fn saddle_instances() -> Vec<(ChannelGains, SystemParams)> {
    random_instances(4, 100)
}

fn criterion_4() -> Outcome {
    let grid = GridSizes { p: 500, tau: 500, gamma: 500 };
    let tau_step = TAU_MAX / (grid.tau - 1) as f64;
    let mut saddle_failures = Vec::new();
    let mut tau_failures = 0;
    let mut worst_jammer: f64 = 0.0;
    for (i, (gains, params)) in saddle_instances().iter().enumerate() {
        let ne = solve_ne(gains, params).unwrap();
        let slack = grid_step_slack(&ne.profile, gains, params, grid).unwrap();
        let report = verify_saddle_point(&ne.profile, gains, params, grid, 1e-8 + slack, true).unwrap();
        if !report.passed {
            worst_jammer = worst_jammer.max(report.jammer_violation);
            saddle_failures.push(format!(
                "#{i}(sir={},zeta={},legit={:.1e},jam={:.1e})",
                10.0 * (params.p_max / params.gamma_max).log10(),
                params.zeta,
                report.legit_violation,
                report.jammer_violation
            ));
        }
        tau_failures += usize::from((report.legit_deviation.1 - ne.profile.legit.tau).abs() > tau_step);
    }
    let mut detail = format!(
        "{} of 100 sets fail the saddle check (worst jammer gain {worst_jammer:e}), {tau_failures} tau mismatches",
        saddle_failures.len()
    );
    if !saddle_failures.is_empty() {
        detail.push_str(&format!("; first failures: {}", saddle_failures[..saddle_failures.len().min(5)].join(" ")));
    }
    Outcome::new(saddle_failures.is_empty() && tau_failures == 0, detail)
}

fn criterion_5() -> Outcome {
    let mut feasible = 0;
    let mut holds = 0;
    let mut exceptions = Vec::new();
    for (i, (gains, params)) in saddle_instances().iter().enumerate() {
        let nj = solve_nj(gains, params).unwrap();
        if !nj.feasible {
            continue;
        }
        feasible += 1;
        let deviation = capacity(params.p_max, 0.0, 0.0, gains, params).unwrap();
        if deviation > nj.value + 1e-9 {
            holds += 1;
        } else {
            exceptions.push(format!("#{i}(C(P,0,0)-C^NJ={:.2e})", deviation - nj.value));
        }
    }
    let share = holds as f64 / feasible.max(1) as f64;
    let mut detail = format!("{holds}/{feasible} NJ-feasible sets ({:.1}%) deviate profitably", 100.0 * share);
    if !exceptions.is_empty() {
        detail.push_str(&format!("; remainder: {}", exceptions.join(" ")));
    }
    Outcome::new(feasible > 0 && share >= 0.95, detail)
}

fn monte_carlo() -> Vec<SweepRecord> {
    sir_sweep(&SweepConfig::reference(10_000, 1)).unwrap()
}

fn criterion_6(records: &[SweepRecord]) -> Outcome {
    let first = records.first().unwrap();
    let last = records.last().unwrap();
    let rises: Vec<f64> = records.windows(2).map(|w| w[1].f - w[0].f).collect();
    let worst_rise = rises.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let passed = first.sir_db == -30.0
        && (0.85..=1.0).contains(&first.f)
        && worst_rise <= 0.03
        && last.sir_db == 10.0
        && last.f < 0.3;
    Outcome::new(
        passed,
        format!("F(-30 dB) = {:.4}, F(+10 dB) = {:.4}, largest rise {worst_rise:.2e}", first.f, last.f),
    )
}

fn criterion_7(records: &[SweepRecord]) -> Outcome {
    let mean = records.iter().map(|r| r.f_nj).sum::<f64>() / records.len() as f64;
    let min = records.iter().map(|r| r.f_nj).fold(f64::INFINITY, f64::min);
    Outcome::new((0.5..=0.9).contains(&mean) && min >= 0.0, format!("mean F^NJ = {mean:.4}, min {min:.4}"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fd = |f: &dyn Fn(f64) -> f64, x: f64| (f(x + 1e-6) - f(x - 1e-6)) / 2e-6;
    let mut worst_fixed: f64 = 0.0;
    for (gains, params) in random_instances(81, 100) {
        let tau = rng.random_range(0.01..0.99);
        let gamma = rng.random_range(0.0..=params.gamma_max);
        let kind = TauProfile::FixedPower { p: params.p_max, gamma };
        let analytic = capacity_tau_derivative(kind, tau, &gains, &params).unwrap();
        let numeric = fd(&|t| capacity(params.p_max, t, gamma, &gains, &params).unwrap(), tau);
        worst_fixed = worst_fixed.max(relative(numeric, analytic));
    }
    let mut worst_threshold: f64 = 0.0;
    let feasible = random_instances(82, 2000).into_iter().filter(|(g, p)| neutralization_feasible(g, p));
    for (gains, params) in feasible.take(100) {
        let tau = rng.random_range(0.01..0.99);
        let analytic = capacity_tau_derivative(TauProfile::OnThreshold, tau, &gains, &params).unwrap();
        let numeric = fd(&|t| capacity(p_threshold(t, &gains, &params), t, 0.0, &gains, &params).unwrap(), tau);
        worst_threshold = worst_threshold.max(relative(numeric, analytic));
    }
    Outcome::new(
        worst_fixed <= 1e-6 && worst_threshold <= 1e-6,
        format!("worst relative error: fixed power {worst_fixed:.2e}, on threshold {worst_threshold:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut feasible, mut infeasible) = (Vec::new(), Vec::new());
    for inst in random_instances(91, 20_000) {
        if neutralization_feasible(&inst.0, &inst.1) {
            if feasible.len() < 200 {
                feasible.push(inst);
            }
        } else if infeasible.len() < 200 {
            infeasible.push(inst);
        }
    }
    let curve = |p: f64, tau: f64, g: &ChannelGains, s: &SystemParams| -> Vec<f64> {
        linspace(0.0, s.gamma_max, 100).iter().map(|&j| capacity(p, tau, j, g, s).unwrap()).collect()
    };
    let nondecreasing = |c: &[f64]| c.windows(2).all(|w| w[1] >= w[0]);
    let nonincreasing = |c: &[f64]| c.windows(2).all(|w| w[1] <= w[0]);
    let mut failures = Vec::new();
    let mut worst_constant: f64 = 0.0;
    for (gains, params) in &feasible {
        let tau = rng.random_range(0.01..0.99);
        let th = p_threshold(tau, gains, params);
        if !nondecreasing(&curve(0.5 * th, tau, gains, params)) {
            failures.push("below threshold");
        }
        if !nonincreasing(&curve(2.0 * th, tau, gains, params)) {
            failures.push("above threshold");
        }
        let on = curve(th, tau, gains, params);
        let spread = on.iter().map(|c| relative(*c, on[0])).fold(0.0, f64::max);
        worst_constant = worst_constant.max(spread);
    }
    for (gains, params) in &infeasible {
        let tau = rng.random_range(0.0..0.99);
        let p = rng.random_range(0.0..=params.p_max);
        if !nonincreasing(&curve(p, tau, gains, params)) {
            failures.push("infeasible");
        }
    }
    let passed = feasible.len() == 200 && infeasible.len() == 200 && failures.is_empty() && worst_constant <= 1e-10;
    Outcome::new(
        passed,
        format!(
            "{} feasible + {} infeasible sets, {} monotonicity failures, worst on-threshold spread {worst_constant:.2e}",
            feasible.len(),
            infeasible.len(),
            failures.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for (gains, params) in random_instances(10, 200) {
        let c = |t: f64| capacity(params.p_max, t, params.gamma_max, &gains, &params).unwrap();
        let n = 1000;
        let h = 1.0 / (n + 1) as f64;
        for i in 1..=n {
            let t = i as f64 * h;
            worst = worst.max(c(t + h) - 2.0 * c(t) + c(t - h));
        }
    }
    Outcome::new(worst <= 1e-9, format!("largest second difference {worst:e}"))
}

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_jamharvest");
    let dir = tempfile::tempdir().unwrap();
    let csv = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let gains = ["--h2", "0.9", "--ga2", "1.1", "--gb2", "0.3"];
    let mut runs: Vec<(Vec<String>, Vec<String>, Option<(String, String)>)> = Vec::new();
    for cmd in ["nj", "ne"] {
        let mut args = vec![cmd.to_string(), "--sir-db".into(), "5".into()];
        args.extend(gains.iter().map(|s| s.to_string()));
        runs.push((args.clone(), args, None));
    }
    let sweep = |threads: &str, out: &str| -> Vec<String> {
        ["sweep", "--seed", "7", "--draws", "2000", "--threads", threads, "--output", out]
            .iter()
            .map(|s| s.to_string())
            .collect()
    };
    let (a, b) = (csv("a.csv"), csv("b.csv"));
    runs.push((sweep("1", &a), sweep("4", &b), Some((a.clone(), b.clone()))));
    let verify = |threads: &str| -> Vec<String> {
        ["verify", "--draws", "8", "--seed", "3", "--grid-p", "60", "--grid-tau", "60", "--grid-gamma", "60", "--threads", threads]
            .iter()
            .map(|s| s.to_string())
            .collect()
    };
    runs.push((verify("1"), verify("4"), None));

    let mut mismatches = Vec::new();
    for (first, second, files) in &runs {
        let x = Command::new(bin).args(first).output().unwrap();
        let y = Command::new(bin).args(second).output().unwrap();
        let mut same = x.stdout == y.stdout && x.stderr == y.stderr && x.status.code() == y.status.code();
        if let Some((fa, fb)) = files {
            // the summary line names the output path, so compare the files themselves
            same = x.status.code() == y.status.code()
                && std::fs::read(fa).unwrap() == std::fs::read(fb).unwrap();
        }
        if !same {
            mismatches.push(first[0].clone());
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!("nj, ne, sweep (1 vs 4 threads), verify (1 vs 4 threads); mismatches: {mismatches:?}"),
    )
}

fn main() -> ExitCode {
    let records = std::cell::OnceCell::new();
    let mc_time = std::cell::Cell::new(Duration::ZERO);
    let shared = || {
        records.get_or_init(|| {
            let start = Instant::now();
            let r = monte_carlo();
            mc_time.set(start.elapsed());
            r
        })
    };

    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(u32, &str, Duration, Check)> = vec![
        (1, "infeasible link never neutralizes", Duration::from_secs(1), Box::new(criterion_1)),
        (2, "NJ profile invariant to budget at high SIR", Duration::from_secs(1), Box::new(criterion_2)),
        (3, "NE dominates NJ", Duration::from_secs(10), Box::new(criterion_3)),
        (4, "NE passes saddle-point oracle", Duration::from_secs(120), Box::new(criterion_4)),
        (5, "NJ profile admits a profitable deviation", Duration::from_secs(5), Box::new(criterion_5)),
        (6, "low-SIR efficiency band", Duration::from_secs(120), Box::new(|| criterion_6(shared()))),
        (7, "NE-vs-NJ average band", Duration::from_secs(120), Box::new(|| criterion_7(shared()))),
        (8, "derivative matches finite differences", Duration::from_secs(1), Box::new(criterion_8)),
        (9, "jammer best-response properties", Duration::from_secs(5), Box::new(criterion_9)),
        (10, "capacity concave in tau", Duration::from_secs(5), Box::new(criterion_10)),
        (11, "CLI determinism", Duration::from_secs(120), Box::new(criterion_11)),
    ];

    let mut failed = 0;
    for (id, name, limit, check) in &criteria {
        let start = Instant::now();
        let outcome = check();
        let mut elapsed = start.elapsed();
        if *id == 7 {
            // both Monte Carlo criteria are charged the shared sweep time
            elapsed += mc_time.get();
        }
        let in_time = elapsed <= *limit;
        let passed = outcome.passed && in_time;
        failed += usize::from(!passed);
        println!(
            "criterion {id:>2} {}: {name} ({:.3}s, limit {}s{}) -- {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", too slow" },
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

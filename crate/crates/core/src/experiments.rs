//! SIR sweeps over fixed or randomly drawn channels and the efficiency
//! metrics comparing the equilibrium with neutralization and with no
//! harvesting at all.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{capacity, db_to_linear, linear_to_db, ChannelGains, SystemParams};
use crate::solvers::{solve_ne, solve_nj};

/// Slack allowed on the dominance `c_ne >= c_nj, c_no_eh` before a ratio is
/// treated as a contract violation.
pub const DOMINANCE_SLACK: f64 = 1e-9;

/// Channel power gains for draw `index` of the stream identified by `seed`.
///
/// Each gain is the square of an independent standard-normal coefficient.
pub fn sample_channels(seed: u64, index: u64) -> ChannelGains {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut draw = || {
        let x: f64 = StandardNormal.sample(&mut rng);
        x * x
    };
    ChannelGains { h2: draw(), ga2: draw(), gb2: draw() }
}

fn relative_gain(c_ne: f64, other: f64, what: &str) -> Result<f64> {
    if !(c_ne >= 0.0) || !(other >= 0.0) {
        return Err(Error::Contract(format!("negative capacity: c_ne = {c_ne}, {what} = {other}")));
    }
    if c_ne == 0.0 {
        if other > 0.0 {
            return Err(Error::Contract(format!("c_ne = 0 while {what} = {other}")));
        }
        return Ok(0.0);
    }
    if other > c_ne + DOMINANCE_SLACK {
        return Err(Error::Contract(format!("{what} = {other} exceeds c_ne = {c_ne}")));
    }
    Ok(((c_ne - other) / c_ne).clamp(0.0, 1.0))
}

/// Relative gain of the equilibrium over neutralization, `(c_ne - c_nj)/c_ne`.
pub fn metric_fnj(c_ne: f64, c_nj: f64) -> Result<f64> {
    relative_gain(c_ne, c_nj, "c_nj")
}

/// Relative gain of the equilibrium over the link without harvesting,
/// `(c_ne - c_no_eh)/c_ne` with `c_no_eh = C(P, 0, Γ)`.
pub fn metric_f(c_ne: f64, c_no_eh: f64) -> Result<f64> {
    relative_gain(c_ne, c_no_eh, "c_no_eh")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub sir_start_db: f64,
    pub sir_stop_db: f64,
    pub sir_step_db: f64,
    /// Evaluate one fixed channel instead of Monte Carlo draws.
    pub fixed_gains: Option<ChannelGains>,
    /// `p_max` is ignored: each point uses `P = SIR * Γ`.
    pub params: SystemParams,
    pub mc_draws: u64,
    pub seed: u64,
    /// Worker threads for the draws: 0 uses the global pool, 1 runs inline.
    pub threads: usize,
}

impl SweepConfig {
    /// Reference sweep: -30..=10 dB in 1 dB steps over random channels.
    pub fn reference(mc_draws: u64, seed: u64) -> Self {
        SweepConfig {
            sir_start_db: -30.0,
            sir_stop_db: 10.0,
            sir_step_db: 1.0,
            fixed_gains: None,
            params: SystemParams::reference(0.0),
            mc_draws,
            seed,
            threads: 0,
        }
    }

    pub fn sir_points(&self) -> Result<Vec<f64>> {
        let (start, stop, step) = (self.sir_start_db, self.sir_stop_db, self.sir_step_db);
        if !start.is_finite() || !stop.is_finite() || !step.is_finite() {
            return Err(Error::Config("SIR range must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(Error::Config(format!("SIR step must be > 0, got {step}")));
        }
        if stop < start {
            return Err(Error::Config(format!("empty SIR range {start}..{stop}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| start + step * i as f64).collect())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if let Some(gains) = &self.fixed_gains {
            gains.validate()?;
        }
        if self.fixed_gains.is_none() && self.mc_draws == 0 {
            return Err(Error::Config("mc_draws must be >= 1".into()));
        }
        self.sir_points().map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub sir_db: f64,
    pub c_ne: f64,
    pub c_nj: f64,
    pub c_no_eh: f64,
    /// Gain over no harvesting, from the averaged capacities.
    pub f: f64,
    /// Gain over neutralization, from the averaged capacities.
    pub f_nj: f64,
    pub nj_feasible_fraction: f64,
    pub tau_ne_mean: f64,
    /// Mean of the per-draw `f` ratios.
    pub f_per_draw: f64,
    /// Mean of the per-draw `f_nj` ratios.
    pub f_nj_per_draw: f64,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Everything computed for one channel at one SIR point.
#[derive(Debug, Clone, Copy)]
struct DrawOutcome {
    c_ne: f64,
    c_nj: f64,
    c_no_eh: f64,
    tau_ne: f64,
    nj_feasible: bool,
    f: f64,
    f_nj: f64,
}

fn evaluate_draw(gains: &ChannelGains, params: &SystemParams) -> Result<DrawOutcome> {
    let ne = solve_ne(gains, params)?;
    let nj = solve_nj(gains, params)?;
    let c_no_eh = capacity(params.p_max, 0.0, params.gamma_max, gains, params)?;
    Ok(DrawOutcome {
        c_ne: ne.value,
        c_nj: nj.value,
        c_no_eh,
        tau_ne: ne.profile.legit.tau,
        nj_feasible: nj.feasible,
        f: metric_f(ne.value, c_no_eh)?,
        f_nj: metric_fnj(ne.value, nj.value)?,
    })
}

fn aggregate(sir_db: f64, outcomes: &[DrawOutcome]) -> Result<SweepRecord> {
    let mut sums = [CompensatedSum::default(); 7];
    for o in outcomes {
        let feasible = if o.nj_feasible { 1.0 } else { 0.0 };
        for (s, v) in sums.iter_mut().zip([o.c_ne, o.c_nj, o.c_no_eh, o.tau_ne, feasible, o.f, o.f_nj]) {
            s.add(v);
        }
    }
    let n = outcomes.len() as f64;
    let [c_ne, c_nj, c_no_eh, tau_ne_mean, nj_feasible_fraction, f_per_draw, f_nj_per_draw] =
        sums.map(|s| s.total() / n);
    Ok(SweepRecord {
        sir_db,
        c_ne,
        c_nj,
        c_no_eh,
        f: metric_f(c_ne, c_no_eh)?,
        f_nj: metric_fnj(c_ne, c_nj)?,
        nj_feasible_fraction,
        tau_ne_mean,
        f_per_draw,
        f_nj_per_draw,
    })
}

fn sweep_point(config: &SweepConfig, sir_db: f64, parallel: bool) -> Result<SweepRecord> {
    let params = config.params.with_p_max(config.params.gamma_max * db_to_linear(sir_db));
    if params.p_max <= 0.0 {
        return Err(Error::Config(format!(
            "SIR {sir_db} dB with gamma_max = {} gives no legitimate power",
            config.params.gamma_max
        )));
    }
    if let Some(gains) = config.fixed_gains {
        return aggregate(sir_db, &[evaluate_draw(&gains, &params)?]);
    }
    let run = |index: u64| evaluate_draw(&sample_channels(config.seed, index), &params);
    let outcomes: Result<Vec<DrawOutcome>> = if parallel {
        (0..config.mc_draws).into_par_iter().map(run).collect()
    } else {
        (0..config.mc_draws).map(run).collect()
    };
    aggregate(sir_db, &outcomes?)
}

/// Runs the sweep. Output depends only on the configuration and seed, not on
/// the thread count.
pub fn sir_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let points = config.sir_points()?;
    let run_all = |parallel: bool| -> Result<Vec<SweepRecord>> {
        points.iter().map(|&sir| sweep_point(config, sir, parallel)).collect()
    };
    match config.threads {
        0 => run_all(true),
        1 => run_all(false),
        n => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?;
            pool.install(|| run_all(true))
        }
    }
}

/// Column set of the emitted CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CsvLayout {
    #[default]
    Standard,
    /// Standard columns followed by `f_per_draw,f_nj_per_draw`.
    WithPerDrawRatios,
}

pub const CSV_HEADER: &str = "sir_db,c_ne,c_nj,c_no_eh,f,f_nj,nj_feasible_fraction,tau_ne_mean";

fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_dbm(mw: f64) -> String {
    format!("{}", linear_to_db(mw))
}

/// Writes the records, sorted by SIR, after `#` comment lines echoing the
/// configuration.
pub fn write_csv_to<W: Write>(
    records: &[SweepRecord],
    config: &SweepConfig,
    layout: CsvLayout,
    mut out: W,
) -> std::io::Result<()> {
    let p = &config.params;
    writeln!(out, "# jamharvest sir sweep")?;
    writeln!(
        out,
        "# n_a_dbm={} n_b_dbm={} gamma_max_dbm={} zeta={}",
        fmt_dbm(p.n_a),
        fmt_dbm(p.n_b),
        fmt_dbm(p.gamma_max),
        p.zeta
    )?;
    writeln!(
        out,
        "# sir_db start={} stop={} step={} (P = SIR * gamma_max)",
        config.sir_start_db, config.sir_stop_db, config.sir_step_db
    )?;
    match config.fixed_gains {
        Some(g) => writeln!(out, "# mode=fixed-gains h2={} ga2={} gb2={}", g.h2, g.ga2, g.gb2)?,
        None => {
            writeln!(out, "# mode=monte-carlo draws={} seed={}", config.mc_draws, config.seed)?;
            writeln!(
                out,
                "# channel model: power gains are squares of independent standard-normal coefficients"
            )?;
        }
    }
    writeln!(out, "# aggregation: f and f_nj are ratios of draw-averaged capacities")?;
    match layout {
        CsvLayout::Standard => writeln!(out, "{CSV_HEADER}")?,
        CsvLayout::WithPerDrawRatios => {
            writeln!(out, "# f_per_draw and f_nj_per_draw are means of per-draw ratios")?;
            writeln!(out, "{CSV_HEADER},f_per_draw,f_nj_per_draw")?;
        }
    }

    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| a.sir_db.total_cmp(&b.sir_db));
    for r in &sorted {
        let mut fields = vec![
            r.sir_db,
            r.c_ne,
            r.c_nj,
            r.c_no_eh,
            r.f,
            r.f_nj,
            r.nj_feasible_fraction,
            r.tau_ne_mean,
        ];
        if layout == CsvLayout::WithPerDrawRatios {
            fields.extend([r.f_per_draw, r.f_nj_per_draw]);
        }
        let line: Vec<String> = fields.into_iter().map(fmt_value).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()
}

pub fn write_csv(
    records: &[SweepRecord],
    config: &SweepConfig,
    layout: CsvLayout,
    destination: &Path,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Contract("no records to write".into()));
    }
    let io_err = |source| Error::Io { path: destination.to_path_buf(), source };
    let file = File::create(destination).map_err(io_err)?;
    write_csv_to(records, config, layout, BufWriter::new(file)).map_err(io_err)
}

//! Command-line front end: `nj`, `ne`, `sweep` and `verify`.
//!
//! Powers are accepted in dBm (`--*-dbm`) or linear milliwatts (`--*-mw`);
//! channel gains are linear. Exit codes: 0 success, 1 usage or
//! configuration error, 2 neutralization infeasible, 3 verification failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use jamharvest::{
    db_to_linear, grid_step_slack, linear_to_db, neutralization_feasible, sample_channels,
    sir_sweep, solve_ne, solve_nj, verify_saddle_point, write_csv, write_csv_to, ChannelGains,
    CsvLayout, EquilibriumResult, GridSizes, SweepConfig, SystemParams,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Environment variable naming the directory for sweep output when
/// `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "JAMHARVEST_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "jamharvest",
    version,
    about = "Anti-jamming with energy harvesting: neutralization, equilibrium and SIR sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Best strategy that keeps the jammer silent
    #[command(allow_negative_numbers = true)]
    Nj(PointArgs),
    /// Full-power equilibrium of the jamming game
    #[command(allow_negative_numbers = true)]
    Ne(PointArgs),
    /// Sweep SIR = P/Γ over fixed or random channels and write CSV
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Check the equilibrium against grid deviations and the dominance bound
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct SystemArgs {
    /// Noise power at Alice [dBm] (default -10)
    #[arg(long, value_name = "DBM", conflicts_with = "na_mw")]
    na_dbm: Option<f64>,
    /// Noise power at Alice [mW]
    #[arg(long, value_name = "MW")]
    na_mw: Option<f64>,
    /// Noise power at Bob [dBm] (default -7)
    #[arg(long, value_name = "DBM", conflicts_with = "nb_mw")]
    nb_dbm: Option<f64>,
    /// Noise power at Bob [mW]
    #[arg(long, value_name = "MW")]
    nb_mw: Option<f64>,
    /// Jamming power budget Γ [dBm] (default 10)
    #[arg(long, value_name = "DBM", conflicts_with = "gamma_mw")]
    gamma_dbm: Option<f64>,
    /// Jamming power budget Γ [mW]
    #[arg(long, value_name = "MW")]
    gamma_mw: Option<f64>,
    /// Harvesting efficiency ζ in [0, 1] (unitless)
    #[arg(long, default_value_t = SystemParams::REFERENCE_ZETA)]
    zeta: f64,
    /// Print the canonical flags of this run before its output
    #[arg(long)]
    echo_config: bool,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Legitimate power budget P [dBm]
    #[arg(long, value_name = "DBM", group = "budget")]
    p_dbm: Option<f64>,
    /// Legitimate power budget P [mW]
    #[arg(long, value_name = "MW", group = "budget")]
    p_mw: Option<f64>,
    /// Legitimate budget as SIR = P/Γ [dB] (default 0)
    #[arg(long, value_name = "DB", group = "budget")]
    sir_db: Option<f64>,
}

#[derive(Debug, Args)]
struct GainArgs {
    /// Alice→Bob power gain |H|^2 (linear)
    #[arg(long)]
    h2: Option<f64>,
    /// Jay→Alice power gain |G_A|^2 (linear)
    #[arg(long)]
    ga2: Option<f64>,
    /// Jay→Bob power gain |G_B|^2 (linear)
    #[arg(long)]
    gb2: Option<f64>,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    gains: GainArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Fixed channel; omit all three for Monte Carlo draws
    #[command(flatten)]
    gains: GainArgs,
    /// First SIR point [dB]
    #[arg(long, value_name = "DB", default_value_t = -30.0)]
    sir_start: f64,
    /// Last SIR point [dB]
    #[arg(long, value_name = "DB", default_value_t = 10.0)]
    sir_stop: f64,
    /// SIR step [dB]
    #[arg(long, value_name = "DB", default_value_t = 1.0)]
    sir_step: f64,
    /// Channel draws per SIR point (Monte Carlo mode)
    #[arg(long, default_value_t = 10_000)]
    draws: u64,
    /// Seed of the channel draws
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = all cores, 1 = sequential); output does not depend on it
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// CSV destination, `-` for stdout [default: $JAMHARVEST_OUTPUT_DIR/sweep.csv or ./sweep.csv]
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Append mean per-draw ratio columns f_per_draw,f_nj_per_draw
    #[arg(long)]
    per_draw_columns: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Fixed channel; omit all three to check random channel draws
    #[command(flatten)]
    gains: GainArgs,
    /// Random channels to check when no gains are given
    #[arg(long, default_value_t = 100)]
    draws: u64,
    /// Seed of the channel draws
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Grid points for the legitimate power on [0, P]
    #[arg(long, default_value_t = 500)]
    grid_p: usize,
    /// Grid points for the EH fraction on [0, 1)
    #[arg(long, default_value_t = 500)]
    grid_tau: usize,
    /// Grid points for the jamming power on [0, Γ]
    #[arg(long, default_value_t = 500)]
    grid_gamma: usize,
    /// Base tolerance, added to the one-grid-step slack
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Worker threads for the grids (0 = all cores, 1 = sequential)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

/// Failure of a subcommand, carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: EXIT_CONFIG, message: message.into() }
    }
}

impl From<jamharvest::Error> for Failure {
    fn from(e: jamharvest::Error) -> Self {
        Failure::config(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config(format!("write failed: {e}"))
    }
}

type CmdResult = Result<i32, Failure>;

fn finite(name: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::config(format!("--{name} must be finite, got {v}")))
    }
}

fn power_mw(name: &str, dbm: Option<f64>, mw: Option<f64>, default_dbm: f64) -> Result<f64, Failure> {
    match (dbm, mw) {
        (_, Some(mw)) => finite(&format!("{name}-mw"), mw),
        (Some(dbm), None) => Ok(db_to_linear(finite(&format!("{name}-dbm"), dbm)?)),
        (None, None) => Ok(db_to_linear(default_dbm)),
    }
}

impl SystemArgs {
    /// Parameters with a placeholder `p_max`; callers set the budget.
    fn params(&self) -> Result<SystemParams, Failure> {
        let gamma_max = power_mw("gamma", self.gamma_dbm, self.gamma_mw, SystemParams::REFERENCE_GAMMA_DBM)?;
        let params = SystemParams {
            n_a: power_mw("na", self.na_dbm, self.na_mw, SystemParams::REFERENCE_NA_DBM)?,
            n_b: power_mw("nb", self.nb_dbm, self.nb_mw, SystemParams::REFERENCE_NB_DBM)?,
            p_max: 1.0,
            gamma_max,
            zeta: finite("zeta", self.zeta)?,
        };
        params.validate()?;
        Ok(params)
    }

    fn canonical(&self, params: &SystemParams) -> String {
        format!(
            "--na-mw {} --nb-mw {} --gamma-mw {} --zeta {}",
            params.n_a, params.n_b, params.gamma_max, params.zeta
        )
    }
}

impl BudgetArgs {
    fn p_max(&self, gamma_max: f64) -> Result<f64, Failure> {
        match (self.p_dbm, self.p_mw, self.sir_db) {
            (_, Some(mw), _) => finite("p-mw", mw),
            (Some(dbm), _, _) => Ok(db_to_linear(finite("p-dbm", dbm)?)),
            (_, _, Some(sir)) => Ok(gamma_max * db_to_linear(finite("sir-db", sir)?)),
            _ => Ok(gamma_max),
        }
    }
}

impl GainArgs {
    fn gains(&self) -> Result<Option<ChannelGains>, Failure> {
        match (self.h2, self.ga2, self.gb2) {
            (Some(h2), Some(ga2), Some(gb2)) => Ok(Some(ChannelGains::new(h2, ga2, gb2)?)),
            (None, None, None) => Ok(None),
            _ => Err(Failure::config("--h2, --ga2 and --gb2 must be given together")),
        }
    }

    fn required(&self) -> Result<ChannelGains, Failure> {
        self.gains()?.ok_or_else(|| Failure::config("--h2, --ga2 and --gb2 are required"))
    }

    fn canonical(gains: &Option<ChannelGains>) -> String {
        match gains {
            Some(g) => format!(" --h2 {} --ga2 {} --gb2 {}", g.h2, g.ga2, g.gb2),
            None => String::new(),
        }
    }
}

fn point_setup(args: &PointArgs) -> Result<(ChannelGains, SystemParams), Failure> {
    let base = args.system.params()?;
    let params = base.with_p_max(args.budget.p_max(base.gamma_max)?);
    params.validate()?;
    Ok((args.gains.required()?, params))
}

fn echo(out: &mut dyn Write, command: &str, system: &SystemArgs, params: &SystemParams, rest: &str) -> std::io::Result<()> {
    if system.echo_config {
        writeln!(out, "# config: {command} {}{rest}", system.canonical(params))?;
    }
    Ok(())
}

fn write_power(out: &mut dyn Write, name: &str, mw: f64) -> std::io::Result<()> {
    writeln!(out, "{name}_mw: {mw}")?;
    writeln!(out, "{name}_dbm: {}", linear_to_db(mw))
}

fn write_solution(out: &mut dyn Write, r: &EquilibriumResult) -> std::io::Result<()> {
    writeln!(out, "regime: {}", r.regime)?;
    write_power(out, "p", r.profile.legit.p)?;
    writeln!(out, "tau: {}", r.profile.legit.tau)?;
    write_power(out, "gamma", r.profile.gamma)?;
    writeln!(out, "capacity_bits: {}", r.value)
}

fn cmd_nj(args: &PointArgs, out: &mut dyn Write) -> CmdResult {
    let (gains, params) = point_setup(args)?;
    let rest = format!(" --p-mw {}{}", params.p_max, GainArgs::canonical(&Some(gains)));
    echo(out, "nj", &args.system, &params, &rest)?;
    let r = solve_nj(&gains, &params)?;
    if !r.feasible {
        return Err(Failure {
            code: EXIT_INFEASIBLE,
            message: format!(
                "neutralization infeasible: |G_A|^2/N_A = {} does not exceed |G_B|^2/N_B = {}{}",
                gains.ga2 / params.n_a,
                gains.gb2 / params.n_b,
                if neutralization_feasible(&gains, &params) { " (or zeta = 0)" } else { "" }
            ),
        });
    }
    write_solution(out, &r)?;
    Ok(EXIT_OK)
}

fn cmd_ne(args: &PointArgs, out: &mut dyn Write) -> CmdResult {
    let (gains, params) = point_setup(args)?;
    let rest = format!(" --p-mw {}{}", params.p_max, GainArgs::canonical(&Some(gains)));
    echo(out, "ne", &args.system, &params, &rest)?;
    let r = solve_ne(&gains, &params)?;
    write_solution(out, &r)?;
    writeln!(out, "full_power_jamming_best_response: {}", r.feasible)?;
    Ok(EXIT_OK)
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    let params = args.system.params()?;
    let fixed_gains = args.gains.gains()?;
    let config = SweepConfig {
        sir_start_db: finite("sir-start", args.sir_start)?,
        sir_stop_db: finite("sir-stop", args.sir_stop)?,
        sir_step_db: finite("sir-step", args.sir_step)?,
        fixed_gains,
        params,
        mc_draws: args.draws,
        seed: args.seed,
        threads: args.threads,
    };
    let destination = args.output.clone().unwrap_or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_default()
            .join("sweep.csv")
    });
    let rest = format!(
        "{} --sir-start {} --sir-stop {} --sir-step {} --draws {} --seed {} --threads {} --output {}{}",
        GainArgs::canonical(&fixed_gains),
        config.sir_start_db,
        config.sir_stop_db,
        config.sir_step_db,
        config.mc_draws,
        config.seed,
        config.threads,
        destination.display(),
        if args.per_draw_columns { " --per-draw-columns" } else { "" }
    );
    echo(out, "sweep", &args.system, &params, &rest)?;

    let layout = if args.per_draw_columns {
        CsvLayout::WithPerDrawRatios
    } else {
        CsvLayout::Standard
    };
    let records = sir_sweep(&config)?;
    if destination.as_os_str() == "-" {
        write_csv_to(&records, &config, layout, &mut *out)?;
    } else {
        write_csv(&records, &config, layout, &destination)?;
        writeln!(out, "wrote {} records to {}", records.len(), destination.display())?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Default)]
struct VerifyTally {
    instances: usize,
    saddle_failures: usize,
    dominance_failures: usize,
    worst_legit: f64,
    worst_jammer: f64,
    worst_dominance: f64,
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let base = args.system.params()?;
    let params = base.with_p_max(args.budget.p_max(base.gamma_max)?);
    params.validate()?;
    let fixed = args.gains.gains()?;
    let tol = finite("tol", args.tol)?;
    let grid = GridSizes { p: args.grid_p, tau: args.grid_tau, gamma: args.grid_gamma };
    let rest = format!(
        " --p-mw {}{} --draws {} --seed {} --grid-p {} --grid-tau {} --grid-gamma {} --tol {} --threads {}",
        params.p_max,
        GainArgs::canonical(&fixed),
        args.draws,
        args.seed,
        grid.p,
        grid.tau,
        grid.gamma,
        tol,
        args.threads
    );
    echo(out, "verify", &args.system, &params, &rest)?;

    let instances: Vec<ChannelGains> = match fixed {
        Some(g) => vec![g],
        None => (0..args.draws).map(|i| sample_channels(args.seed, i)).collect(),
    };
    if instances.is_empty() {
        return Err(Failure::config("--draws must be >= 1"));
    }
    let parallel = args.threads != 1;
    let check = |gains: &ChannelGains| -> Result<_, jamharvest::Error> {
        let ne = solve_ne(gains, &params)?;
        let nj = solve_nj(gains, &params)?;
        let slack = grid_step_slack(&ne.profile, gains, &params, grid)?;
        let report = verify_saddle_point(&ne.profile, gains, &params, grid, tol + slack, parallel)?;
        Ok((ne, nj, report))
    };
    let run = || -> Result<VerifyTally, jamharvest::Error> {
        let mut tally = VerifyTally {
            worst_legit: f64::NEG_INFINITY,
            worst_jammer: f64::NEG_INFINITY,
            worst_dominance: f64::INFINITY,
            ..Default::default()
        };
        for gains in &instances {
            let (ne, nj, report) = check(gains)?;
            let margin = ne.value - nj.value;
            tally.instances += 1;
            tally.saddle_failures += usize::from(!report.passed);
            tally.dominance_failures += usize::from(margin < -1e-9);
            tally.worst_legit = tally.worst_legit.max(report.legit_violation);
            tally.worst_jammer = tally.worst_jammer.max(report.jammer_violation);
            tally.worst_dominance = tally.worst_dominance.min(margin);
        }
        Ok(tally)
    };
    let tally = match args.threads {
        0 | 1 => run()?,
        n => rayon_pool(n)?.install(run)?,
    };

    writeln!(out, "instances: {}", tally.instances)?;
    writeln!(out, "tolerance: {tol:e} + one-grid-step slack")?;
    writeln!(out, "worst_legit_violation: {:e}", tally.worst_legit)?;
    writeln!(out, "worst_jammer_violation: {:e}", tally.worst_jammer)?;
    writeln!(out, "saddle_failures: {}", tally.saddle_failures)?;
    writeln!(out, "worst_dominance_margin: {:e}", tally.worst_dominance)?;
    writeln!(out, "dominance_failures: {}", tally.dominance_failures)?;
    let passed = tally.saddle_failures == 0 && tally.dominance_failures == 0;
    writeln!(out, "result: {}", if passed { "pass" } else { "fail" })?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn rayon_pool(threads: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::config(format!("cannot start {threads} worker threads: {e}")))
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return EXIT_OK;
                }
                _ => EXIT_CONFIG,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Nj(args) => cmd_nj(args, out),
        Command::Ne(args) => cmd_ne(args, out),
        Command::Sweep(args) => cmd_sweep(args, out),
        Command::Verify(args) => cmd_verify(args, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

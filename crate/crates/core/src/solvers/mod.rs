//! Neutralizing strategy, game equilibrium and their verification.
//!
//! Every one-dimensional profile optimized here has the form
//! `C(tau) = u/2 * log2(1 + g(tau)/u)` with `u = 1 - tau` and `g` affine in
//! `tau`. Such profiles are concave on `[0, 1)`, so the maximizer is either
//! the unique zero of the derivative or an endpoint.

pub mod oracle;
mod root;

use std::f64::consts::LN_2;

use rayon::prelude::*;

pub use root::{find_root_bracketed, RootSolveReport};

use crate::error::{Error, Result};
use crate::model::{
    capacity, jammer_best_response, k_constant, neutralization_feasible, p_threshold,
    ChannelGains, JammerRegime, StrategyProfile, SystemParams, TAU_MAX,
};

/// Bracket width at which the `tau` root solves stop.
pub const TAU_TOLERANCE: f64 = 1e-13;

/// One-dimensional slice of the capacity along `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauProfile {
    /// `tau -> C(p, tau, gamma)`.
    FixedPower { p: f64, gamma: f64 },
    /// `tau -> C(p_th(tau), tau, 0)`: the legitimate power rides the
    /// neutralization threshold and the jammer is silent.
    OnThreshold,
}

/// `g(tau) = alpha + beta * tau`, the SINR numerator scaled by `1 - tau`.
#[derive(Debug, Clone, Copy)]
struct AffineProfile {
    alpha: f64,
    beta: f64,
}

impl AffineProfile {
    fn new(kind: TauProfile, gains: &ChannelGains, params: &SystemParams) -> Result<Self> {
        match kind {
            TauProfile::FixedPower { p, gamma } => {
                if !(p >= 0.0) || !(gamma >= 0.0) {
                    return Err(Error::Contract(format!(
                        "fixed-power profile needs p >= 0 and gamma >= 0, got p = {p}, gamma = {gamma}"
                    )));
                }
                let snr_per_mw = gains.h2 / (gamma * gains.gb2 + params.n_b);
                Ok(AffineProfile {
                    alpha: snr_per_mw * p,
                    beta: snr_per_mw * params.zeta * (gamma * gains.ga2 + params.n_a),
                })
            }
            TauProfile::OnThreshold => {
                let k = threshold_slope(gains, params)?;
                let snr_per_mw = gains.h2 / params.n_b;
                Ok(AffineProfile {
                    alpha: 0.0,
                    beta: snr_per_mw * (k + params.zeta * params.n_a),
                })
            }
        }
    }

    fn value(&self, tau: f64) -> f64 {
        let u = 1.0 - tau;
        0.5 * u * ((self.alpha + self.beta * tau) / u).ln_1p() / LN_2
    }

    fn derivative(&self, tau: f64) -> f64 {
        let u = 1.0 - tau;
        let g = self.alpha + self.beta * tau;
        0.5 * (-(g / u).ln_1p() + (self.alpha + self.beta) / (u + g)) / LN_2
    }
}

/// Finite, positive `K`; the on-threshold profile is undefined otherwise.
fn threshold_slope(gains: &ChannelGains, params: &SystemParams) -> Result<f64> {
    if !neutralization_feasible(gains, params) {
        return Err(Error::Infeasible);
    }
    let k = k_constant(gains, params);
    if k.is_infinite() {
        return Err(Error::UnboundedThreshold);
    }
    if !(k > 0.0) {
        return Err(Error::Infeasible);
    }
    Ok(k)
}

/// Analytic `dC/dtau` along the chosen profile.
pub fn capacity_tau_derivative(
    kind: TauProfile,
    tau: f64,
    gains: &ChannelGains,
    params: &SystemParams,
) -> Result<f64> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::Domain { name: "tau", value: tau, domain: "[0, 1)" });
    }
    Ok(AffineProfile::new(kind, gains, params)?.derivative(tau))
}

/// Maximizer of a concave `tau` profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauSolution {
    /// The derivative changes sign; the root is the maximizer.
    Interior(RootSolveReport),
    /// The derivative keeps one sign on `[0, 1 - 1e-9]`.
    Boundary { tau: f64 },
}

impl TauSolution {
    pub fn tau(&self) -> f64 {
        match self {
            TauSolution::Interior(report) => report.root,
            TauSolution::Boundary { tau } => *tau,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, TauSolution::Boundary { .. })
    }
}

fn maximize_profile(profile: AffineProfile) -> Result<TauSolution> {
    let boundary = || {
        let tau = if profile.value(TAU_MAX) > profile.value(0.0) { TAU_MAX } else { 0.0 };
        TauSolution::Boundary { tau }
    };
    if !(profile.derivative(0.0) > 0.0) || !(profile.derivative(TAU_MAX) < 0.0) {
        return Ok(boundary());
    }
    let report = find_root_bracketed(|t| profile.derivative(t), 0.0, TAU_MAX, TAU_TOLERANCE)?;
    Ok(TauSolution::Interior(report))
}

/// Maximizer of `tau -> C(tau * K, tau, 0)` (the best EH fraction when the
/// legitimate power sits exactly on the neutralization threshold).
pub fn tau_hat(gains: &ChannelGains, params: &SystemParams) -> Result<TauSolution> {
    maximize_profile(AffineProfile::new(TauProfile::OnThreshold, gains, params)?)
}

/// Maximizer of `tau -> C(P, tau, 0)`.
pub fn tau_tilde(gains: &ChannelGains, params: &SystemParams) -> Result<TauSolution> {
    if !neutralization_feasible(gains, params) {
        return Err(Error::Infeasible);
    }
    let kind = TauProfile::FixedPower { p: params.p_max, gamma: 0.0 };
    maximize_profile(AffineProfile::new(kind, gains, params)?)
}

/// Maximizer of `tau -> C(P, tau, Γ)`.
pub fn tau_star(gains: &ChannelGains, params: &SystemParams) -> Result<TauSolution> {
    let kind = TauProfile::FixedPower { p: params.p_max, gamma: params.gamma_max };
    maximize_profile(AffineProfile::new(kind, gains, params)?)
}

/// Which branch of the neutralization or equilibrium solution applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquilibriumRegime {
    /// `P/K > 1`: power rides the threshold at `tau_hat`, independent of `P`.
    NjCaseA,
    NjCaseBCandidate1,
    NjCaseBCandidate2,
    NjInfeasible,
    NeTauZero,
    NeTauInterior,
}

impl EquilibriumRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquilibriumRegime::NjCaseA => "nj-case-a",
            EquilibriumRegime::NjCaseBCandidate1 => "nj-case-b-candidate1",
            EquilibriumRegime::NjCaseBCandidate2 => "nj-case-b-candidate2",
            EquilibriumRegime::NjInfeasible => "nj-infeasible",
            EquilibriumRegime::NeTauZero => "ne-tau-zero",
            EquilibriumRegime::NeTauInterior => "ne-tau-interior",
        }
    }
}

impl std::fmt::Display for EquilibriumRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumResult {
    pub profile: StrategyProfile,
    /// Capacity at `profile`, in bits per channel use.
    pub value: f64,
    pub regime: EquilibriumRegime,
    /// Neutralizing results: whether the jammer can be neutralized at all.
    /// Equilibrium results: whether full-power jamming is a best response
    /// at the returned legitimate action, i.e. `P >= p_th(tau)`.
    pub feasible: bool,
}

fn result(
    profile: StrategyProfile,
    regime: EquilibriumRegime,
    feasible: bool,
    gains: &ChannelGains,
    params: &SystemParams,
) -> Result<EquilibriumResult> {
    let value = profile.capacity(gains, params)?;
    Ok(EquilibriumResult { profile, value, regime, feasible })
}

/// Capacity-maximizing legitimate action subject to the jammer's best
/// response being silence.
pub fn solve_nj(gains: &ChannelGains, params: &SystemParams) -> Result<EquilibriumResult> {
    gains.validate()?;
    params.validate()?;
    let p_max = params.p_max;
    let k = k_constant(gains, params);
    if !neutralization_feasible(gains, params) || !(k > 0.0) {
        let profile = StrategyProfile::new(0.0, 0.0, 0.0);
        return result(profile, EquilibriumRegime::NjInfeasible, false, gains, params);
    }
    if k.is_infinite() {
        // the jammer cannot reach Bob; every action keeps it silent
        let tau = tau_tilde(gains, params)?.tau();
        let profile = StrategyProfile::new(p_max, tau, 0.0);
        return result(profile, EquilibriumRegime::NjCaseBCandidate2, true, gains, params);
    }

    let inverse = p_max / k;
    let hat = tau_hat(gains, params)?.tau();
    if inverse > 1.0 {
        let profile = StrategyProfile::new(p_threshold(hat, gains, params), hat, 0.0);
        return result(profile, EquilibriumRegime::NjCaseA, true, gains, params);
    }

    let tau1 = hat.min(inverse);
    let p1 = p_threshold(tau1, gains, params).min(p_max);
    let mut tau2 = tau_tilde(gains, params)?.tau().max(inverse);
    // P/K * K may round below P
    while p_threshold(tau2, gains, params) < p_max {
        tau2 = tau2.next_up();
    }
    let first = StrategyProfile::new(p1, tau1, 0.0);
    let second = StrategyProfile::new(p_max, tau2, 0.0);
    let c1 = first.capacity(gains, params)?;
    let c2 = second.capacity(gains, params)?;
    if c2 > c1 {
        Ok(EquilibriumResult {
            profile: second,
            value: c2,
            regime: EquilibriumRegime::NjCaseBCandidate2,
            feasible: true,
        })
    } else {
        Ok(EquilibriumResult {
            profile: first,
            value: c1,
            regime: EquilibriumRegime::NjCaseBCandidate1,
            feasible: true,
        })
    }
}

/// Full-power equilibrium candidate `(P, tau_ne, Γ)` with `tau_ne` maximizing
/// `C(P, tau, Γ)`.
pub fn solve_ne(gains: &ChannelGains, params: &SystemParams) -> Result<EquilibriumResult> {
    gains.validate()?;
    params.validate()?;
    let tau = tau_star(gains, params)?.tau();
    let regime = if tau == 0.0 {
        EquilibriumRegime::NeTauZero
    } else {
        EquilibriumRegime::NeTauInterior
    };
    let response = jammer_best_response(params.p_max, tau, gains, params)?;
    let feasible = params.gamma_max == 0.0 || response.regime != JammerRegime::SilentOptimal;
    let profile = StrategyProfile::new(params.p_max, tau, params.gamma_max);
    result(profile, regime, feasible, gains, params)
}

/// Grid resolution for the saddle-point check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSizes {
    pub p: usize,
    pub tau: usize,
    pub gamma: usize,
}

impl Default for GridSizes {
    fn default() -> Self {
        GridSizes { p: 500, tau: 500, gamma: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleReport {
    pub passed: bool,
    /// `max_grid C(a_L, gamma0) - C(profile)`; positive means the legitimate
    /// pair gains by deviating.
    pub legit_violation: f64,
    /// Legitimate grid action achieving `legit_violation`.
    pub legit_deviation: (f64, f64),
    /// `C(profile) - min_grid C(a_L0, gamma)`; positive means the jammer
    /// gains by deviating.
    pub jammer_violation: f64,
    pub jammer_deviation: f64,
}

impl SaddleReport {
    pub fn worst_violation(&self) -> f64 {
        self.legit_violation.max(self.jammer_violation)
    }
}

/// Checks that neither player can improve on `profile` by moving to a
/// point of the action grids `[0, P] x [0, 1 - 1e-9]` and `[0, Γ]`.
pub fn verify_saddle_point(
    profile: &StrategyProfile,
    gains: &ChannelGains,
    params: &SystemParams,
    grid: GridSizes,
    tol: f64,
    parallel: bool,
) -> Result<SaddleReport> {
    if grid.p == 0 || grid.tau == 0 || grid.gamma == 0 {
        return Err(Error::Contract("grid sizes must be positive".into()));
    }
    let value = profile.capacity(gains, params)?;
    let gamma0 = profile.gamma;
    let legit = oracle::grid_argmax_2d(
        |p, tau| capacity(p, tau, gamma0, gains, params).unwrap_or(f64::NAN),
        (0.0, params.p_max, grid.p),
        (0.0, TAU_MAX, grid.tau),
        parallel,
    )
    .ok_or_else(|| Error::Contract("legitimate grid produced no finite capacity".into()))?;

    let gammas = oracle::linspace(0.0, params.gamma_max, grid.gamma);
    let (p0, tau0) = (profile.legit.p, profile.legit.tau);
    let eval = |&g: &f64| capacity(p0, tau0, g, gains, params).unwrap_or(f64::NAN);
    let jam_values: Vec<f64> = if parallel {
        gammas.par_iter().map(eval).collect()
    } else {
        gammas.iter().map(eval).collect()
    };
    let mut jammer_violation = f64::NEG_INFINITY;
    let mut jammer_deviation = gamma0;
    for (&g, &c) in gammas.iter().zip(&jam_values) {
        if value - c > jammer_violation {
            jammer_violation = value - c;
            jammer_deviation = g;
        }
    }

    let legit_violation = legit.value - value;
    Ok(SaddleReport {
        passed: legit_violation <= tol && jammer_violation <= tol,
        legit_violation,
        legit_deviation: (legit.x, legit.y),
        jammer_violation,
        jammer_deviation,
    })
}

/// Largest capacity change from moving `profile` by one grid step along any
/// single coordinate; the discretization slack for [`verify_saddle_point`].
pub fn grid_step_slack(
    profile: &StrategyProfile,
    gains: &ChannelGains,
    params: &SystemParams,
    grid: GridSizes,
) -> Result<f64> {
    let value = profile.capacity(gains, params)?;
    let step = |hi: f64, n: usize| if n > 1 { hi / (n - 1) as f64 } else { 0.0 };
    let (dp, dtau, dgamma) = (
        step(params.p_max, grid.p),
        step(TAU_MAX, grid.tau),
        step(params.gamma_max, grid.gamma),
    );
    let StrategyProfile { legit, gamma } = *profile;
    let mut slack: f64 = 0.0;
    for sign in [-1.0, 1.0] {
        let p = (legit.p + sign * dp).clamp(0.0, params.p_max);
        let tau = (legit.tau + sign * dtau).clamp(0.0, TAU_MAX);
        let g = (gamma + sign * dgamma).clamp(0.0, params.gamma_max);
        for c in [
            capacity(p, legit.tau, gamma, gains, params)?,
            capacity(legit.p, tau, gamma, gains, params)?,
            capacity(legit.p, legit.tau, g, gains, params)?,
        ] {
            slack = slack.max((c - value).abs());
        }
    }
    Ok(slack)
}

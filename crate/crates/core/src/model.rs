//! Capacity model of the time-switching energy-harvesting link under jamming.
//!
//! Alice harvests RF energy from the jammer (Jay) and from noise during a
//! fraction `tau` of each cycle and spends it, together with her own budget
//! `p`, in the remaining `1 - tau` of the cycle. All powers are linear
//! milliwatts; gains are linear power gains `|H|^2`, `|G_A|^2`, `|G_B|^2`.
//! Capacities are in bits per channel use.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Largest EH fraction the optimizers consider; `tau = 1` is only a limit.
pub const TAU_MAX: f64 = 1.0 - 1e-9;

/// Power gains of the Alice→Bob, Jay→Alice and Jay→Bob links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGains {
    pub h2: f64,
    pub ga2: f64,
    pub gb2: f64,
}

impl ChannelGains {
    pub fn new(h2: f64, ga2: f64, gb2: f64) -> Result<Self> {
        let gains = ChannelGains { h2, ga2, gb2 };
        gains.validate()?;
        Ok(gains)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("h2", self.h2), ("ga2", self.ga2), ("gb2", self.gb2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidGains(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        Ok(())
    }
}

/// Noise powers, power budgets and harvesting efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Noise power at Alice (mW).
    pub n_a: f64,
    /// Noise power at Bob (mW).
    pub n_b: f64,
    /// Legitimate power budget `P` (mW).
    pub p_max: f64,
    /// Jamming power budget `Γ` (mW).
    pub gamma_max: f64,
    /// Harvesting efficiency in `[0, 1]`.
    pub zeta: f64,
}

impl SystemParams {
    pub const REFERENCE_NA_DBM: f64 = -10.0;
    pub const REFERENCE_NB_DBM: f64 = -7.0;
    pub const REFERENCE_GAMMA_DBM: f64 = 10.0;
    pub const REFERENCE_ZETA: f64 = 0.8;

    pub fn new(n_a: f64, n_b: f64, p_max: f64, gamma_max: f64, zeta: f64) -> Result<Self> {
        let params = SystemParams { n_a, n_b, p_max, gamma_max, zeta };
        params.validate()?;
        Ok(params)
    }

    /// Reference setting: N_A = -10 dBm, N_B = -7 dBm, Γ = 10 dBm, ζ = 0.8,
    /// with the legitimate budget set from the signal-to-interference ratio
    /// `P/Γ` in dB.
    pub fn reference(sir_db: f64) -> Self {
        let gamma_max = db_to_linear(Self::REFERENCE_GAMMA_DBM);
        SystemParams {
            n_a: db_to_linear(Self::REFERENCE_NA_DBM),
            n_b: db_to_linear(Self::REFERENCE_NB_DBM),
            p_max: gamma_max * db_to_linear(sir_db),
            gamma_max,
            zeta: Self::REFERENCE_ZETA,
        }
    }

    /// Same parameters with a different legitimate budget.
    pub fn with_p_max(self, p_max: f64) -> Self {
        SystemParams { p_max, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("n_a", self.n_a), ("n_b", self.n_b), ("p_max", self.p_max)];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} = {v} must be finite and > 0")));
            }
        }
        if !self.gamma_max.is_finite() || self.gamma_max < 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma_max = {} must be finite and >= 0",
                self.gamma_max
            )));
        }
        if !(0.0..=1.0).contains(&self.zeta) {
            return Err(Error::InvalidParams(format!("zeta = {} must lie in [0, 1]", self.zeta)));
        }
        Ok(())
    }
}

/// Action `(p, tau)` of the legitimate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegitStrategy {
    pub p: f64,
    pub tau: f64,
}

/// Joint action of both players.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyProfile {
    pub legit: LegitStrategy,
    pub gamma: f64,
}

impl StrategyProfile {
    pub fn new(p: f64, tau: f64, gamma: f64) -> Self {
        StrategyProfile { legit: LegitStrategy { p, tau }, gamma }
    }

    pub fn capacity(&self, gains: &ChannelGains, params: &SystemParams) -> Result<f64> {
        capacity(self.legit.p, self.legit.tau, self.gamma, gains, params)
    }
}

/// How the jammer's objective behaves in `gamma` for a fixed legitimate action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JammerRegime {
    /// Capacity increases with jamming power: the jammer stays silent.
    SilentOptimal,
    /// Capacity decreases with jamming power: the jammer transmits at `Γ`.
    FullPowerOptimal,
    /// Capacity does not depend on the jamming power.
    ConstantCapacity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JammerResponse {
    pub gamma: f64,
    pub regime: JammerRegime,
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn check_tau_open(tau: f64) -> Result<()> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::domain("tau", tau, "[0, 1)"));
    }
    Ok(())
}

fn check_nonneg(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::domain(name, v, "[0, inf)"));
    }
    Ok(())
}

/// Average power harvested during the EH phase and spent over the
/// transmission phase: `tau/(1-tau) * zeta * (gamma*|G_A|^2 + N_A)`.
pub fn harvested_power(
    tau: f64,
    gamma: f64,
    gains: &ChannelGains,
    params: &SystemParams,
) -> Result<f64> {
    check_tau_open(tau)?;
    check_nonneg("gamma", gamma)?;
    Ok(tau / (1.0 - tau) * params.zeta * (gamma * gains.ga2 + params.n_a))
}

/// Shannon capacity of the Alice–Bob link with time-switching harvesting.
///
/// `(1-tau)/2 * log2(1 + (p/(1-tau) + p_eh) |H|^2 / (gamma |G_B|^2 + N_B))`,
/// taken as 0 at `tau = 1`.
pub fn capacity(
    p: f64,
    tau: f64,
    gamma: f64,
    gains: &ChannelGains,
    params: &SystemParams,
) -> Result<f64> {
    check_nonneg("p", p)?;
    check_nonneg("gamma", gamma)?;
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::domain("tau", tau, "[0, 1]"));
    }
    if tau == 1.0 {
        return Ok(0.0);
    }
    let u = 1.0 - tau;
    let tx_power = p / u + harvested_power(tau, gamma, gains, params)?;
    let sinr = tx_power * gains.h2 / (gamma * gains.gb2 + params.n_b);
    Ok(0.5 * u * sinr.ln_1p() / LN_2)
}

/// Slope `K` of the neutralization threshold `p_th(tau) = tau * K`, in mW.
///
/// Non-positive values mean the jammer cannot be neutralized. With
/// `|G_B|^2 = 0` the jammer never reaches Bob and `K` is `+inf`.
pub fn k_constant(gains: &ChannelGains, params: &SystemParams) -> f64 {
    if params.zeta == 0.0 {
        return 0.0;
    }
    if gains.gb2 == 0.0 {
        return if gains.ga2 > 0.0 { f64::INFINITY } else { -params.n_a * params.zeta };
    }
    (gains.ga2 * params.n_b / gains.gb2 - params.n_a) * params.zeta
}

/// Whether the harvesting link beats the jamming link:
/// `|G_A|^2/N_A > |G_B|^2/N_B`, strictly.
pub fn neutralization_feasible(gains: &ChannelGains, params: &SystemParams) -> bool {
    // cross-multiplied form avoids the division; noise powers are positive
    gains.ga2 * params.n_b > gains.gb2 * params.n_a
}

/// Neutralization threshold `tau * K` (mW).
pub fn p_threshold(tau: f64, gains: &ChannelGains, params: &SystemParams) -> f64 {
    if tau == 0.0 {
        return 0.0;
    }
    tau * k_constant(gains, params)
}

/// Inverse of [`p_threshold`]: the EH fraction whose threshold equals `p`.
/// Values above 1 mean no admissible `tau` reaches `p`.
pub fn p_threshold_inverse(p: f64, gains: &ChannelGains, params: &SystemParams) -> Result<f64> {
    let k = k_constant(gains, params);
    if !(k > 0.0) {
        return Err(Error::Infeasible);
    }
    Ok(p / k)
}

/// Jamming power minimizing the capacity for a fixed legitimate action.
///
/// The capacity is monotone in `gamma`, so the best response is either
/// silence or full power; at `p = p_th(tau)` every `gamma` is optimal and
/// silence is reported.
pub fn jammer_best_response(
    p: f64,
    tau: f64,
    gains: &ChannelGains,
    params: &SystemParams,
) -> Result<JammerResponse> {
    check_nonneg("p", p)?;
    check_tau_open(tau)?;
    let full = JammerResponse { gamma: params.gamma_max, regime: JammerRegime::FullPowerOptimal };
    if !neutralization_feasible(gains, params) {
        return Ok(full);
    }
    let regime = if gains.gb2 == 0.0 {
        // d/dgamma of the SINR numerator only; the sign is that of tau*zeta*|G_A|^2
        if tau * params.zeta * gains.ga2 > 0.0 {
            JammerRegime::SilentOptimal
        } else {
            JammerRegime::ConstantCapacity
        }
    } else {
        let threshold = p_threshold(tau, gains, params);
        if p < threshold {
            JammerRegime::SilentOptimal
        } else if p > threshold {
            JammerRegime::FullPowerOptimal
        } else {
            JammerRegime::ConstantCapacity
        }
    };
    Ok(match regime {
        JammerRegime::FullPowerOptimal => full,
        regime => JammerResponse { gamma: 0.0, regime },
    })
}

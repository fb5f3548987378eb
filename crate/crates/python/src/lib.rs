//! Python bindings: channel and system types, the capacity model, the two
//! equilibrium solvers, the saddle-point oracle and SIR sweeps.

use jamharvest as core;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(err: core::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// Squared channel magnitudes: `h2` (legitimate link), `ga2` (jammer to
/// harvesting node), `gb2` (jammer to receiver).
#[pyclass(name = "ChannelGains", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyChannelGains(core::ChannelGains);

#[pymethods]
impl PyChannelGains {
    #[new]
    fn new(h2: f64, ga2: f64, gb2: f64) -> PyResult<Self> {
        core::ChannelGains::new(h2, ga2, gb2).map(Self).map_err(to_py)
    }

    #[getter]
    fn h2(&self) -> f64 {
        self.0.h2
    }

    #[getter]
    fn ga2(&self) -> f64 {
        self.0.ga2
    }

    #[getter]
    fn gb2(&self) -> f64 {
        self.0.gb2
    }

    fn __repr__(&self) -> String {
        format!("ChannelGains(h2={}, ga2={}, gb2={})", self.0.h2, self.0.ga2, self.0.gb2)
    }
}

/// Noise powers, power budgets (all in mW) and harvesting efficiency.
#[pyclass(name = "SystemParams", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PySystemParams(core::SystemParams);

#[pymethods]
impl PySystemParams {
    #[new]
    fn new(n_a: f64, n_b: f64, p_max: f64, gamma_max: f64, zeta: f64) -> PyResult<Self> {
        core::SystemParams::new(n_a, n_b, p_max, gamma_max, zeta).map(Self).map_err(to_py)
    }

    /// Reference noise levels and jamming budget with `P = Γ · 10^(sir_db/10)`.
    #[staticmethod]
    fn reference(sir_db: f64) -> Self {
        Self(core::SystemParams::reference(sir_db))
    }

    fn with_p_max(&self, p_max: f64) -> PyResult<Self> {
        let params = self.0.with_p_max(p_max);
        params.validate().map_err(to_py)?;
        Ok(Self(params))
    }

    #[getter]
    fn n_a(&self) -> f64 {
        self.0.n_a
    }

    #[getter]
    fn n_b(&self) -> f64 {
        self.0.n_b
    }

    #[getter]
    fn p_max(&self) -> f64 {
        self.0.p_max
    }

    #[getter]
    fn gamma_max(&self) -> f64 {
        self.0.gamma_max
    }

    #[getter]
    fn zeta(&self) -> f64 {
        self.0.zeta
    }

    fn __repr__(&self) -> String {
        let s = &self.0;
        format!(
            "SystemParams(n_a={}, n_b={}, p_max={}, gamma_max={}, zeta={})",
            s.n_a, s.n_b, s.p_max, s.gamma_max, s.zeta
        )
    }
}

/// Solver output: the profile `(p, tau, gamma)`, its capacity in bits per
/// channel use, the regime tag and whether the profile is attainable.
#[pyclass(name = "EquilibriumResult", frozen, get_all)]
struct PyEquilibriumResult {
    p: f64,
    tau: f64,
    gamma: f64,
    value: f64,
    regime: &'static str,
    feasible: bool,
}

impl From<core::EquilibriumResult> for PyEquilibriumResult {
    fn from(r: core::EquilibriumResult) -> Self {
        PyEquilibriumResult {
            p: r.profile.legit.p,
            tau: r.profile.legit.tau,
            gamma: r.profile.gamma,
            value: r.value,
            regime: r.regime.as_str(),
            feasible: r.feasible,
        }
    }
}

#[pymethods]
impl PyEquilibriumResult {
    fn __repr__(&self) -> String {
        format!(
            "EquilibriumResult(p={}, tau={}, gamma={}, value={}, regime='{}', feasible={})",
            self.p,
            self.tau,
            self.gamma,
            self.value,
            self.regime,
            if self.feasible { "True" } else { "False" }
        )
    }
}

#[pyfunction]
fn db_to_linear(x_db: f64) -> f64 {
    core::db_to_linear(x_db)
}

#[pyfunction]
fn linear_to_db(x: f64) -> f64 {
    core::linear_to_db(x)
}

#[pyfunction]
fn capacity(p: f64, tau: f64, gamma: f64, gains: &PyChannelGains, params: &PySystemParams) -> PyResult<f64> {
    core::capacity(p, tau, gamma, &gains.0, &params.0).map_err(to_py)
}

#[pyfunction]
fn harvested_power(tau: f64, gamma: f64, gains: &PyChannelGains, params: &PySystemParams) -> PyResult<f64> {
    core::harvested_power(tau, gamma, &gains.0, &params.0).map_err(to_py)
}

#[pyfunction]
fn k_constant(gains: &PyChannelGains, params: &PySystemParams) -> f64 {
    core::k_constant(&gains.0, &params.0)
}

#[pyfunction]
fn neutralization_feasible(gains: &PyChannelGains, params: &PySystemParams) -> bool {
    core::neutralization_feasible(&gains.0, &params.0)
}

#[pyfunction]
fn p_threshold(tau: f64, gains: &PyChannelGains, params: &PySystemParams) -> f64 {
    core::p_threshold(tau, &gains.0, &params.0)
}

/// Returns `(gamma, regime)` with regime one of `"silent"`, `"full-power"`
/// or `"constant"`.
#[pyfunction]
fn jammer_best_response(
    p: f64,
    tau: f64,
    gains: &PyChannelGains,
    params: &PySystemParams,
) -> PyResult<(f64, &'static str)> {
    let r = core::jammer_best_response(p, tau, &gains.0, &params.0).map_err(to_py)?;
    let regime = match r.regime {
        core::JammerRegime::SilentOptimal => "silent",
        core::JammerRegime::FullPowerOptimal => "full-power",
        core::JammerRegime::ConstantCapacity => "constant",
    };
    Ok((r.gamma, regime))
}

#[pyfunction]
fn tau_star(gains: &PyChannelGains, params: &PySystemParams) -> PyResult<f64> {
    core::tau_star(&gains.0, &params.0).map(|s| s.tau()).map_err(to_py)
}

#[pyfunction]
fn solve_nj(gains: &PyChannelGains, params: &PySystemParams) -> PyResult<PyEquilibriumResult> {
    core::solve_nj(&gains.0, &params.0).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn solve_ne(gains: &PyChannelGains, params: &PySystemParams) -> PyResult<PyEquilibriumResult> {
    core::solve_ne(&gains.0, &params.0).map(Into::into).map_err(to_py)
}

/// Grid check of a profile; returns a dict with `passed`, the worst
/// violation of each player and the deviation achieving it.
#[pyfunction]
#[pyo3(signature = (p, tau, gamma, gains, params, grid=(500, 500, 500), tol=1e-8))]
#[allow(clippy::too_many_arguments)]
fn verify_saddle_point<'py>(
    py: Python<'py>,
    p: f64,
    tau: f64,
    gamma: f64,
    gains: &PyChannelGains,
    params: &PySystemParams,
    grid: (usize, usize, usize),
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let profile = core::StrategyProfile::new(p, tau, gamma);
    let grid = core::GridSizes { p: grid.0, tau: grid.1, gamma: grid.2 };
    let (g, s) = (gains.0, params.0);
    let report = py
        .detach(|| {
            let slack = core::grid_step_slack(&profile, &g, &s, grid)?;
            core::verify_saddle_point(&profile, &g, &s, grid, tol + slack, true)
        })
        .map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("passed", report.passed)?;
    out.set_item("legit_violation", report.legit_violation)?;
    out.set_item("legit_deviation", report.legit_deviation)?;
    out.set_item("jammer_violation", report.jammer_violation)?;
    out.set_item("jammer_deviation", report.jammer_deviation)?;
    Ok(out)
}

/// SIR sweep over the reference system. With `gains` the channel is fixed;
/// otherwise `draws` random channels are averaged. Returns one dict per SIR
/// point with the CSV columns plus the per-draw ratio averages.
#[pyfunction]
#[pyo3(signature = (sir_start_db=-30.0, sir_stop_db=10.0, sir_step_db=1.0, gains=None, params=None, draws=10_000, seed=1, threads=0))]
#[allow(clippy::too_many_arguments)]
fn sir_sweep<'py>(
    py: Python<'py>,
    sir_start_db: f64,
    sir_stop_db: f64,
    sir_step_db: f64,
    gains: Option<&PyChannelGains>,
    params: Option<&PySystemParams>,
    draws: u64,
    seed: u64,
    threads: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let base = core::SweepConfig::reference(draws, seed);
    let config = core::SweepConfig {
        sir_start_db,
        sir_stop_db,
        sir_step_db,
        fixed_gains: gains.map(|g| g.0),
        params: params.map_or(base.params, |p| p.0),
        threads,
        ..base
    };
    let records = py.detach(|| core::sir_sweep(&config)).map_err(to_py)?;
    records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("sir_db", r.sir_db)?;
            d.set_item("c_ne", r.c_ne)?;
            d.set_item("c_nj", r.c_nj)?;
            d.set_item("c_no_eh", r.c_no_eh)?;
            d.set_item("f", r.f)?;
            d.set_item("f_nj", r.f_nj)?;
            d.set_item("nj_feasible_fraction", r.nj_feasible_fraction)?;
            d.set_item("tau_ne_mean", r.tau_ne_mean)?;
            d.set_item("f_per_draw", r.f_per_draw)?;
            d.set_item("f_nj_per_draw", r.f_nj_per_draw)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "jamharvest")]
fn python_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannelGains>()?;
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyEquilibriumResult>()?;
    m.add("TAU_MAX", core::TAU_MAX)?;
    m.add("CSV_HEADER", core::CSV_HEADER)?;
    m.add_function(wrap_pyfunction!(db_to_linear, m)?)?;
    m.add_function(wrap_pyfunction!(linear_to_db, m)?)?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(harvested_power, m)?)?;
    m.add_function(wrap_pyfunction!(k_constant, m)?)?;
    m.add_function(wrap_pyfunction!(neutralization_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(p_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(jammer_best_response, m)?)?;
    m.add_function(wrap_pyfunction!(tau_star, m)?)?;
    m.add_function(wrap_pyfunction!(solve_nj, m)?)?;
    m.add_function(wrap_pyfunction!(solve_ne, m)?)?;
    m.add_function(wrap_pyfunction!(verify_saddle_point, m)?)?;
    m.add_function(wrap_pyfunction!(sir_sweep, m)?)?;
    Ok(())
}

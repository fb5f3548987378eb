//! Anti-jamming with RF energy harvesting as a zero-sum game.
//!
//! A legitimate pair chooses a transmit power `p` and a harvesting fraction
//! `tau`; a jammer chooses its power `gamma`. The utility is the Shannon
//! capacity of the link. The crate evaluates the capacity model, computes
//! the strategy that keeps the jammer silent (neutralization) and the
//! full-power equilibrium, verifies them against dense grids, and runs SIR
//! sweeps over fixed or random channels.

pub mod error;
pub mod experiments;
pub mod model;
pub mod solvers;

pub use error::{Error, Result};
pub use experiments::{
    metric_f, metric_fnj, sample_channels, sir_sweep, write_csv, write_csv_to, CsvLayout,
    SweepConfig, SweepRecord, CSV_HEADER,
};
pub use model::{
    capacity, db_to_linear, harvested_power, jammer_best_response, k_constant, linear_to_db,
    neutralization_feasible, p_threshold, p_threshold_inverse, ChannelGains, JammerRegime,
    JammerResponse, LegitStrategy, StrategyProfile, SystemParams, TAU_MAX,
};
pub use solvers::{
    capacity_tau_derivative, find_root_bracketed, grid_step_slack, solve_ne, solve_nj, tau_hat,
    tau_star, tau_tilde, verify_saddle_point, EquilibriumRegime, EquilibriumResult, GridSizes,
    RootSolveReport, SaddleReport, TauProfile, TauSolution,
};

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid channel gains: {0}")]
    InvalidGains(String),

    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    /// An argument lies outside the domain of the model function.
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("neutralization infeasible: |G_A|^2/N_A must exceed |G_B|^2/N_B")]
    Infeasible,

    #[error("neutralization threshold is unbounded (|G_B|^2 = 0)")]
    UnboundedThreshold,

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid sweep configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain { name, value, domain }
    }
}

#![allow(dead_code)]

use jamharvest::{sample_channels, ChannelGains, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ZETAS: [f64; 4] = [0.2, 0.5, 0.8, 1.0];
pub const SIRS_DB: [f64; 4] = [-30.0, -10.0, 0.0, 10.0];

/// Random instance: sampled channel gains, harvesting efficiency and SIR
/// picked from small sets, reference noise and jamming budget.
pub fn random_instances(seed: u64, count: usize) -> Vec<(ChannelGains, SystemParams)> {
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

/// Central finite difference of `f` at `x`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

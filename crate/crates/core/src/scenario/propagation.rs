use rand_distr::{Distribution, Normal};

use super::{DistanceUnit, SimConfig};
use crate::rng::RandomStream;

pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const NOISE_TEMPERATURE_K: f64 = 290.0;

/// Thermal noise power `k_B * T * B * NF` in watts.
pub fn noise_power_w(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    BOLTZMANN * NOISE_TEMPERATURE_K * bandwidth_hz * 10f64.powf(noise_figure_db / 10.0)
}

/// Three-slope path loss in dB (negative), evaluated piecewise as printed:
/// no continuity is imposed across the breakpoints.
pub fn path_loss_db(d_m: f64, cfg: &SimConfig) -> f64 {
    let scale = match cfg.distance_unit {
        DistanceUnit::Meters => 1.0,
        DistanceUnit::Kilometers => 1e-3,
    };
    let d = d_m * scale;
    let d0 = cfg.d0_m * scale;
    let d1 = cfg.d1_m * scale;
    let l = cfg.pathloss_const_db;
    if d > d1 {
        -l - 35.0 * d.log10()
    } else if d > d0 {
        -l - 15.0 * d1.log10() - 20.0 * d.log10()
    } else {
        -l - 15.0 * d1.log10() - 20.0 * d0.log10()
    }
}

/// Linear gain `10^((pl + x) / 10)` with `x ~ N(0, sigma_sh^2)` in dB.
///
/// Shadowing is applied at every distance. One normal sample is consumed even
/// when `sigma_sh = 0` so that streams stay aligned across configurations.
pub fn large_scale_fading(pl_db: f64, rng: &mut RandomStream, cfg: &SimConfig) -> f64 {
    let shadow = Normal::new(0.0, cfg.shadowing_std_db)
        .expect("shadowing std validated as finite and nonnegative")
        .sample(rng);
    10f64.powf((pl_db + shadow) / 10.0)
}

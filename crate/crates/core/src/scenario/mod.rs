//! Network realizations: geometry, large-scale fading, user-centric clustering,
//! pilot assignment and channel-estimate statistics.

mod association;
mod pilots;
mod propagation;
mod statistics;

pub use association::associate;
pub use pilots::{assign_pilots, pilot_groups};
pub use propagation::{large_scale_fading, noise_power_w, path_loss_db, BOLTZMANN, NOISE_TEMPERATURE_K};
pub use statistics::{compute_gamma, ChannelStatistics};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Unit in which distances enter the three-slope path-loss formula.
///
/// The breakpoints `d0_m`/`d1_m` are always configured in meters; with
/// `Km` every distance (including the breakpoints) is converted to km before
/// taking logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DistanceUnit {
    Meters,
    #[default]
    Kilometers,
}

/// How pilot SNRs of co-pilot UEs enter the estimate statistics and the
/// contamination term of the SINR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PilotSnrMode {
    /// Each UE uses its own pilot SNR `rho_k`.
    #[default]
    PerUe,
    /// Co-pilot UEs are treated as having the same SNR as the UE being
    /// estimated (`rho_k' = rho_k`).
    Common,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub area_side_m: f64,
    pub num_aps: usize,
    pub antennas_per_ap: usize,
    pub num_ues: usize,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    /// Informational only; folded into `pathloss_const_db`.
    #[serde(default = "default_carrier")]
    pub carrier_freq_hz: f64,
    pub coherence_len: usize,
    pub pilot_len: usize,
    pub assoc_threshold: f64,
    pub shadowing_std_db: f64,
    pub pathloss_const_db: f64,
    pub d0_m: f64,
    pub d1_m: f64,
    #[serde(default)]
    pub distance_unit: DistanceUnit,
    #[serde(default)]
    pub pilot_snr_mode: PilotSnrMode,
    pub rng_seed: u64,
}

fn default_carrier() -> f64 {
    1.9e9
}

impl SimConfig {
    /// Full-scale defaults: 256 four-antenna APs and 16 UEs.
    pub fn paper() -> Self {
        SimConfig {
            area_side_m: 1000.0,
            num_aps: 256,
            antennas_per_ap: 4,
            num_ues: 16,
            bandwidth_hz: 20e6,
            noise_figure_db: 7.0,
            carrier_freq_hz: 1.9e9,
            coherence_len: 200,
            pilot_len: 20,
            assoc_threshold: 0.99,
            shadowing_std_db: 8.0,
            pathloss_const_db: 140.7,
            d0_m: 10.0,
            d1_m: 50.0,
            distance_unit: DistanceUnit::Kilometers,
            pilot_snr_mode: PilotSnrMode::PerUe,
            rng_seed: 1,
        }
    }

    /// Scaled-down layout (64 two-antenna APs, 8 UEs) for quick runs.
    pub fn desk() -> Self {
        SimConfig {
            num_aps: 64,
            antennas_per_ap: 2,
            num_ues: 8,
            ..Self::paper()
        }
    }

    /// Checks the hard invariants and returns soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let finite_nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::config(name, format!("must be finite and >= 0, got {v}")))
            }
        };
        finite_nonneg("area_side_m", self.area_side_m)?;
        finite_nonneg("shadowing_std_db", self.shadowing_std_db)?;
        finite_nonneg("d0_m", self.d0_m)?;
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(Error::config("bandwidth_hz", "must be > 0"));
        }
        if !self.noise_figure_db.is_finite() {
            return Err(Error::config("noise_figure_db", "must be finite"));
        }
        if !self.pathloss_const_db.is_finite() {
            return Err(Error::config("pathloss_const_db", "must be finite"));
        }
        if self.num_aps == 0 {
            return Err(Error::config("num_aps", "must be >= 1"));
        }
        if self.antennas_per_ap == 0 {
            return Err(Error::config("antennas_per_ap", "must be >= 1"));
        }
        if self.num_ues == 0 {
            return Err(Error::config("num_ues", "must be >= 1"));
        }
        if self.pilot_len == 0 || self.pilot_len > self.coherence_len {
            return Err(Error::config(
                "pilot_len",
                format!(
                    "need 0 < pilot_len <= coherence_len, got {} / {}",
                    self.pilot_len, self.coherence_len
                ),
            ));
        }
        if !(self.assoc_threshold > 0.0 && self.assoc_threshold <= 1.0) {
            return Err(Error::config("assoc_threshold", "must lie in (0, 1]"));
        }
        if !(self.d0_m < self.d1_m && self.d1_m < self.area_side_m) {
            return Err(Error::config("d1_m", "need d0_m < d1_m < area_side_m"));
        }
        let mut warnings = Vec::new();
        if self.num_aps * self.antennas_per_ap < 4 * self.num_ues {
            warnings.push(format!(
                "M*N = {} is below 4K = {}; channel hardening assumptions are weak",
                self.num_aps * self.antennas_per_ap,
                4 * self.num_ues
            ));
        }
        Ok(warnings)
    }

    pub fn noise_power_w(&self) -> f64 {
        noise_power_w(self.bandwidth_hz, self.noise_figure_db)
    }

    /// `1 - tau_p / tau_c`.
    pub fn prelog(&self) -> f64 {
        1.0 - self.pilot_len as f64 / self.coherence_len as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeProfile {
    pub weight: f64,
    /// Watts.
    pub p_max: f64,
    /// bits/s/Hz.
    pub min_rate: f64,
    pub pa_efficiency: f64,
    /// Watts.
    pub circuit_power: f64,
    /// Linear pilot power over noise power.
    pub pilot_snr: f64,
    /// Index of the priority group the UE was drawn from.
    #[serde(default)]
    pub group: usize,
}

impl UeProfile {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("weight", self.weight),
            ("p_max", self.p_max),
            ("min_rate", self.min_rate),
            ("circuit_power", self.circuit_power),
            ("pilot_snr", self.pilot_snr),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(self.pa_efficiency > 0.0 && self.pa_efficiency <= 1.0) {
            return Err(Error::config("pa_efficiency", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Rescales weights in place so they sum to the number of UEs.
pub fn normalize_weights(profiles: &mut [UeProfile]) {
    let total: f64 = profiles.iter().map(|p| p.weight).sum();
    if total > 0.0 {
        let k = profiles.len() as f64;
        for p in profiles.iter_mut() {
            p.weight *= k / total;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkScenario {
    pub ap_positions: Vec<[f64; 2]>,
    pub ue_positions: Vec<[f64; 2]>,
    /// `beta[m][k]`, linear.
    pub beta: Vec<Vec<f64>>,
    pub pilot_index: Vec<usize>,
    /// Serving APs of each UE, strongest first.
    pub assoc_sets: Vec<Vec<usize>>,
    pub ue_profiles: Vec<UeProfile>,
}

/// Uniform i.i.d. AP and UE positions on `[0, D]^2`.
pub fn place_network(cfg: &SimConfig, rng: &mut RandomStream) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let d = cfg.area_side_m;
    let point = |rng: &mut RandomStream| [d * rng.random::<f64>(), d * rng.random::<f64>()];
    let aps = (0..cfg.num_aps).map(|_| point(rng)).collect();
    let ues = (0..cfg.num_ues).map(|_| point(rng)).collect();
    (aps, ues)
}

impl NetworkScenario {
    /// Runs placement, fading, association and pilot assignment.
    pub fn generate(cfg: &SimConfig, ue_profiles: Vec<UeProfile>, rng: &mut RandomStream) -> Result<Self> {
        cfg.validate()?;
        if ue_profiles.len() != cfg.num_ues {
            return Err(Error::config(
                "ue_profiles",
                format!("expected {} profiles, got {}", cfg.num_ues, ue_profiles.len()),
            ));
        }
        for p in &ue_profiles {
            p.validate()?;
        }
        let (ap_positions, ue_positions) = place_network(cfg, rng);
        let beta: Vec<Vec<f64>> = ap_positions
            .iter()
            .map(|ap| {
                ue_positions
                    .iter()
                    .map(|ue| {
                        let d = ((ap[0] - ue[0]).powi(2) + (ap[1] - ue[1]).powi(2)).sqrt();
                        large_scale_fading(path_loss_db(d, cfg), rng, cfg)
                    })
                    .collect()
            })
            .collect();
        Self::from_parts(cfg, ap_positions, ue_positions, beta, ue_profiles)
    }

    /// Builds a scenario from a given gain matrix (clustering and pilots are
    /// derived, not supplied).
    pub fn from_parts(
        cfg: &SimConfig,
        ap_positions: Vec<[f64; 2]>,
        ue_positions: Vec<[f64; 2]>,
        beta: Vec<Vec<f64>>,
        ue_profiles: Vec<UeProfile>,
    ) -> Result<Self> {
        let k = ue_profiles.len();
        if beta.len() != cfg.num_aps || beta.iter().any(|row| row.len() != k) {
            return Err(Error::config("beta", "gain matrix must be num_aps x num_ues"));
        }
        for (m, row) in beta.iter().enumerate() {
            for (ue, &value) in row.iter().enumerate() {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::NonPositiveGain { ap: m, ue, value });
                }
            }
        }
        let assoc_sets = (0..k)
            .map(|ue| {
                let column: Vec<f64> = beta.iter().map(|row| row[ue]).collect();
                associate(&column, cfg.assoc_threshold)
            })
            .collect();
        let pilot_index = assign_pilots(k, cfg.pilot_len, &beta);
        Ok(NetworkScenario {
            ap_positions,
            ue_positions,
            beta,
            pilot_index,
            assoc_sets,
            ue_profiles,
        })
    }

    pub fn num_aps(&self) -> usize {
        self.beta.len()
    }

    pub fn num_ues(&self) -> usize {
        self.ue_profiles.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

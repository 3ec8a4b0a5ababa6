use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scenario::{ChannelStatistics, NetworkScenario, SimConfig, UeProfile};

/// One network realization together with everything the closed-form SINR
/// needs: estimate statistics, array size, noise power and frame structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemModel {
    pub scenario: NetworkScenario,
    pub stats: ChannelStatistics,
    pub antennas_per_ap: usize,
    /// Watts.
    pub noise_power: f64,
    pub coherence_len: usize,
    pub pilot_len: usize,
    pub bandwidth_hz: f64,
}

impl SystemModel {
    pub fn new(cfg: &SimConfig, scenario: NetworkScenario) -> Result<Self> {
        let stats = ChannelStatistics::from_scenario(&scenario, cfg.pilot_len, cfg.pilot_snr_mode)?;
        Ok(SystemModel {
            scenario,
            stats,
            antennas_per_ap: cfg.antennas_per_ap,
            noise_power: cfg.noise_power_w(),
            coherence_len: cfg.coherence_len,
            pilot_len: cfg.pilot_len,
            bandwidth_hz: cfg.bandwidth_hz,
        })
    }

    pub fn num_aps(&self) -> usize {
        self.scenario.num_aps()
    }

    pub fn num_ues(&self) -> usize {
        self.scenario.num_ues()
    }

    pub fn profiles(&self) -> &[UeProfile] {
        &self.scenario.ue_profiles
    }

    pub fn weights(&self) -> Vec<f64> {
        self.profiles().iter().map(|p| p.weight).collect()
    }

    pub fn p_max(&self) -> Vec<f64> {
        self.profiles().iter().map(|p| p.p_max).collect()
    }

    pub fn prelog(&self) -> f64 {
        1.0 - self.pilot_len as f64 / self.coherence_len as f64
    }

    /// SINR needed for UE k to reach its minimum rate.
    pub fn qos_threshold(&self, k: usize) -> f64 {
        sinr_threshold(self.profiles()[k].min_rate, self.coherence_len, self.pilot_len)
    }
}

/// `2^(tau_c r / (tau_c - tau_p)) - 1`.
pub fn sinr_threshold(min_rate: f64, coherence_len: usize, pilot_len: usize) -> f64 {
    let tc = coherence_len as f64;
    let tp = pilot_len as f64;
    (tc * min_rate / (tc - tp)).exp2() - 1.0
}

use serde::{Deserialize, Serialize};

use super::{pilot_groups, NetworkScenario, PilotSnrMode, UeProfile};
use crate::error::{Error, Result};

/// Second-order statistics of the local MMSE channel estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelStatistics {
    /// `gamma[m][k]`: mean-square value of one component of the estimate.
    pub gamma: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    pub pilot_groups: Vec<Vec<usize>>,
    pub pilot_snr: Vec<f64>,
    pub pilot_snr_mode: PilotSnrMode,
}

impl ChannelStatistics {
    pub fn from_scenario(scenario: &NetworkScenario, tau_p: usize, mode: PilotSnrMode) -> Result<Self> {
        let groups = pilot_groups(&scenario.pilot_index);
        let gamma = compute_gamma(&scenario.beta, &groups, &scenario.ue_profiles, tau_p, mode)?;
        Ok(ChannelStatistics {
            gamma,
            beta: scenario.beta.clone(),
            pilot_groups: groups,
            pilot_snr: scenario.ue_profiles.iter().map(|p| p.pilot_snr).collect(),
            pilot_snr_mode: mode,
        })
    }

    /// `sqrt(rho_j / rho_k)` as it enters the contamination term.
    pub fn snr_ratio_sqrt(&self, j: usize, k: usize) -> f64 {
        match self.pilot_snr_mode {
            PilotSnrMode::PerUe => (self.pilot_snr[j] / self.pilot_snr[k]).sqrt(),
            PilotSnrMode::Common => 1.0,
        }
    }
}

/// `gamma_mk = tau_p rho_k beta_mk^2 / (tau_p sum_{j in P_k} rho_j beta_mj + 1)`.
///
/// Pilots are orthonormal, so cross-correlations are exactly one inside a
/// pilot group and zero elsewhere.
pub fn compute_gamma(
    beta: &[Vec<f64>],
    pilot_groups: &[Vec<usize>],
    profiles: &[UeProfile],
    tau_p: usize,
    mode: PilotSnrMode,
) -> Result<Vec<Vec<f64>>> {
    let tau = tau_p as f64;
    for (m, row) in beta.iter().enumerate() {
        for (ue, &value) in row.iter().enumerate() {
            if !(value > 0.0) {
                return Err(Error::NonPositiveGain { ap: m, ue, value });
            }
        }
    }
    Ok(beta
        .iter()
        .map(|row| {
            (0..profiles.len())
                .map(|k| {
                    let rho_k = profiles[k].pilot_snr;
                    let contamination: f64 = pilot_groups[k]
                        .iter()
                        .map(|&j| {
                            let rho_j = match mode {
                                PilotSnrMode::PerUe => profiles[j].pilot_snr,
                                PilotSnrMode::Common => rho_k,
                            };
                            rho_j * row[j]
                        })
                        .sum();
                    tau * rho_k * row[k] * row[k] / (tau * contamination + 1.0)
                })
                .collect()
        })
        .collect())
}

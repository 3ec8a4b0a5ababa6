//! Monte-Carlo campaigns: config ingestion, seeded trials, algorithm
//! dispatch and aggregation.

mod report;

pub use report::{
    aggregate, export_report, AlgorithmSummary, CampaignReport, GroupSummary, TrialRecord, CDF_PREFIX,
    RECORDS_CSV, SUMMARY_JSON, TRACES_CSV, TRIALS_CSV,
};

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::Evaluation;
use crate::model::SystemModel;
use crate::optimizer::{self, Algorithm, SolveOptions};
use crate::rng::{child_seed, stream};
use crate::scenario::{noise_power_w, NetworkScenario, SimConfig, UeProfile};

/// UE template shared by every member of a priority group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorityGroup {
    pub name: String,
    pub count: usize,
    pub p_max_w: f64,
    /// bits/s/Hz.
    pub min_rate: f64,
    pub pa_efficiency: f64,
    pub circuit_power_w: f64,
    /// Pilot transmit power; defaults to `p_max_w`.
    #[serde(default)]
    pub pilot_power_w: Option<f64>,
}

impl PriorityGroup {
    fn profile(&self, weight: f64, group: usize, noise_w: f64) -> UeProfile {
        UeProfile {
            weight,
            p_max: self.p_max_w,
            min_rate: self.min_rate,
            pa_efficiency: self.pa_efficiency,
            circuit_power: self.circuit_power_w,
            pilot_snr: self.pilot_power_w.unwrap_or(self.p_max_w) / noise_w,
            group,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub sim: SimConfig,
    #[serde(default)]
    pub solve: SolveOptions,
    /// The first group is the high-priority one.
    pub priority_groups: Vec<PriorityGroup>,
    /// High-priority weight over low-priority weight.
    pub omega: f64,
    pub algorithms: Vec<Algorithm>,
    pub num_trials: usize,
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Paper,
    Desk,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper" => Some(Preset::Paper),
            "desk" => Some(Preset::Desk),
            _ => None,
        }
    }
}

fn table_groups(num_ues: usize) -> Vec<PriorityGroup> {
    let high = num_ues / 2;
    let group = |name: &str, count, p_max_w, min_rate| PriorityGroup {
        name: name.to_string(),
        count,
        p_max_w,
        min_rate,
        pa_efficiency: 0.4,
        circuit_power_w: 1.0,
        pilot_power_w: None,
    };
    vec![group("high", high, 0.5, 1.0), group("low", num_ues - high, 0.2, 0.5)]
}

impl CampaignConfig {
    pub fn preset(preset: Preset) -> Self {
        let sim = match preset {
            Preset::Paper => SimConfig::paper(),
            Preset::Desk => SimConfig::desk(),
        };
        CampaignConfig {
            priority_groups: table_groups(sim.num_ues),
            sim,
            solve: SolveOptions::default(),
            omega: 1.0,
            algorithms: Algorithm::ALL.to_vec(),
            num_trials: match preset {
                Preset::Paper => 100,
                Preset::Desk => 50,
            },
            output_dir: PathBuf::from("out"),
            threads: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config("config", e.to_string()))
    }

    /// Hard checks with field-level errors; returns soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let warnings = self.sim.validate()?;
        self.solve.validate()?;
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::config("omega", format!("must be finite and > 0, got {}", self.omega)));
        }
        if self.priority_groups.is_empty() {
            return Err(Error::config("priority_groups", "need at least one group"));
        }
        let total: usize = self.priority_groups.iter().map(|g| g.count).sum();
        if total != self.sim.num_ues {
            return Err(Error::config(
                "priority_groups",
                format!("group counts sum to {total}, sim.num_ues is {}", self.sim.num_ues),
            ));
        }
        let noise = self.sim.noise_power_w();
        for (i, g) in self.priority_groups.iter().enumerate() {
            g.profile(1.0, i, noise).validate().map_err(|e| match e {
                Error::Config { field, message } => {
                    Error::config(format!("priority_groups[{i}].{field}"), message)
                }
                other => other,
            })?;
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("algorithms", "need at least one algorithm"));
        }
        if self.num_trials == 0 {
            return Err(Error::config("num_trials", "must be >= 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be >= 1"));
        }
        Ok(warnings)
    }

    pub fn ue_profiles(&self) -> Vec<UeProfile> {
        let weights = weights_from_omega(&self.priority_groups, self.omega);
        let noise = noise_power_w(self.sim.bandwidth_hz, self.sim.noise_figure_db);
        let mut out = Vec::with_capacity(weights.len());
        for (gi, g) in self.priority_groups.iter().enumerate() {
            for _ in 0..g.count {
                out.push(g.profile(weights[out.len()], gi, noise));
            }
        }
        out
    }
}

/// Per-UE weights: the first group gets `omega` times the weight of every
/// other group, scaled so the weights sum to the number of UEs.
pub fn weights_from_omega(groups: &[PriorityGroup], omega: f64) -> Vec<f64> {
    let k: usize = groups.iter().map(|g| g.count).sum();
    let high = groups.first().map_or(0, |g| g.count);
    let low = k - high;
    if low == 0 || high == 0 {
        return vec![1.0; k];
    }
    let w_low = k as f64 / (omega * high as f64 + low as f64);
    let w_high = omega * w_low;
    let mut w = vec![w_high; high];
    w.resize(k, w_low);
    w
}

/// Hex SHA-256 of the scenario's JSON form.
pub fn scenario_hash(scenario: &NetworkScenario) -> Result<String> {
    let digest = Sha256::digest(scenario.to_json()?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Builds the scenario and model of one trial.
pub fn trial_model(cfg: &CampaignConfig, trial: usize) -> Result<(u64, SystemModel)> {
    let seed = child_seed(cfg.sim.rng_seed, trial as u64);
    let scenario = NetworkScenario::generate(&cfg.sim, cfg.ue_profiles(), &mut stream(seed))?;
    Ok((seed, SystemModel::new(&cfg.sim, scenario)?))
}

fn run_trial(cfg: &CampaignConfig, trial: usize) -> Result<Vec<TrialRecord>> {
    let (seed, model) = trial_model(cfg, trial)?;
    let hash = scenario_hash(&model.scenario)?;
    let mut out = Vec::with_capacity(cfg.algorithms.len());
    for &algorithm in &cfg.algorithms {
        let base = TrialRecord::empty(trial, seed, algorithm, &model, hash.clone());
        let record = match optimizer::run(algorithm, &model, &cfg.solve) {
            Ok(state) => {
                let eval = Evaluation::at(&model, &state.q, &state.u)?;
                TrialRecord {
                    feasible: true,
                    final_wsee: eval.wsee,
                    final_wgee: eval.wgee,
                    iterations: state.iterations_used,
                    converged: state.converged,
                    q: state.q,
                    se: eval.se,
                    ee: eval.ee,
                    trace: state.objective_trace,
                    ..base
                }
            }
            Err(Error::InfeasibleQos { .. }) => base,
            Err(e) => return Err(e),
        };
        out.push(record);
    }
    Ok(out)
}

/// Runs every trial (in parallel when the pool allows) and merges results in
/// trial order, so the report does not depend on scheduling.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let work = || -> Result<Vec<Vec<TrialRecord>>> {
        (0..cfg.num_trials).into_par_iter().map(|t| run_trial(cfg, t)).collect()
    };
    let per_trial = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    // the pool size is an execution detail and must not leak into the report
    let config = CampaignConfig {
        threads: None,
        ..cfg.clone()
    };
    Ok(CampaignReport::new(config, records))
}

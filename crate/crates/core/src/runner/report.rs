use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CampaignConfig;
use crate::error::Result;
use crate::model::SystemModel;
use crate::optimizer::Algorithm;

pub const TRIALS_CSV: &str = "trials.csv";
pub const RECORDS_CSV: &str = "records.csv";
pub const TRACES_CSV: &str = "traces.csv";
pub const SUMMARY_JSON: &str = "summary.json";
/// CDF files are named `cdf_<algorithm>_<group>_<ee|se>.csv`.
pub const CDF_PREFIX: &str = "cdf";

/// One algorithm run on one trial's scenario. Infeasible runs keep empty
/// per-UE vectors and zero objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub feasible: bool,
    pub final_wsee: f64,
    pub final_wgee: f64,
    pub iterations: usize,
    pub converged: bool,
    pub scenario_hash: String,
    pub weights: Vec<f64>,
    pub groups: Vec<usize>,
    pub q: Vec<f64>,
    pub se: Vec<f64>,
    pub ee: Vec<f64>,
    pub trace: Vec<f64>,
}

impl TrialRecord {
    pub(super) fn empty(trial: usize, seed: u64, algorithm: Algorithm, model: &SystemModel, hash: String) -> Self {
        TrialRecord {
            trial,
            seed,
            algorithm,
            feasible: false,
            final_wsee: 0.0,
            final_wgee: 0.0,
            iterations: 0,
            converged: false,
            scenario_hash: hash,
            weights: model.weights(),
            groups: model.profiles().iter().map(|p| p.group).collect(),
            q: Vec::new(),
            se: Vec::new(),
            ee: Vec::new(),
            trace: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub name: String,
    pub mean_ee: f64,
    pub mean_se: f64,
    /// Sorted per-UE samples pooled over feasible trials.
    pub ee_cdf: Vec<f64>,
    pub se_cdf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub feasible_trials: usize,
    pub infeasible_trials: usize,
    pub mean_wsee: f64,
    pub mean_wgee: f64,
    pub mean_iterations: f64,
    pub groups: Vec<GroupSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<AlgorithmSummary>,
}

impl CampaignReport {
    pub fn new(config: CampaignConfig, records: Vec<TrialRecord>) -> Self {
        let summaries = aggregate(&config, &records);
        CampaignReport {
            config,
            records,
            summaries,
        }
    }

    pub fn summary(&self, algorithm: Algorithm) -> Option<&AlgorithmSummary> {
        self.summaries.iter().find(|s| s.algorithm == algorithm)
    }

    pub fn records_for(&self, algorithm: Algorithm) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(move |r| r.algorithm == algorithm)
    }

    /// True if some algorithm was requested but never found a feasible trial.
    pub fn exhausted(&self) -> bool {
        self.summaries.iter().any(|s| s.feasible_trials == 0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Means and CDFs over feasible records, per algorithm in config order.
pub fn aggregate(config: &CampaignConfig, records: &[TrialRecord]) -> Vec<AlgorithmSummary> {
    config
        .algorithms
        .iter()
        .map(|&algorithm| {
            let all: Vec<&TrialRecord> = records.iter().filter(|r| r.algorithm == algorithm).collect();
            let ok: Vec<&TrialRecord> = all.iter().copied().filter(|r| r.feasible).collect();
            let groups = config
                .priority_groups
                .iter()
                .enumerate()
                .map(|(gi, g)| {
                    let mut ee = Vec::new();
                    let mut se = Vec::new();
                    for r in &ok {
                        for k in (0..r.groups.len()).filter(|&k| r.groups[k] == gi) {
                            ee.push(r.ee[k]);
                            se.push(r.se[k]);
                        }
                    }
                    GroupSummary {
                        name: g.name.clone(),
                        mean_ee: mean(&ee),
                        mean_se: mean(&se),
                        ee_cdf: sorted(ee),
                        se_cdf: sorted(se),
                    }
                })
                .collect();
            let collect = |f: fn(&TrialRecord) -> f64| ok.iter().map(|r| f(r)).collect::<Vec<_>>();
            AlgorithmSummary {
                algorithm,
                feasible_trials: ok.len(),
                infeasible_trials: all.len() - ok.len(),
                mean_wsee: mean(&collect(|r| r.final_wsee)),
                mean_wgee: mean(&collect(|r| r.final_wgee)),
                mean_iterations: mean(&collect(|r| r.iterations as f64)),
                groups,
            }
        })
        .collect()
}

/// Writes the CSV tables, the JSON summary and one CDF file per
/// (algorithm, group, metric). Returns the written paths.
///
/// Schemas:
/// - `trials.csv`: trial, seed, algorithm, ue_id, priority, weight, q_w, se, ee
/// - `records.csv`: trial, seed, algorithm, feasible, final_wsee, final_wgee,
///   iterations, converged, scenario_hash
/// - `traces.csv`: trial, algorithm, iteration, objective
/// - `cdf_*.csv`: value
pub fn export_report(report: &CampaignReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let names: Vec<&str> = report.config.priority_groups.iter().map(|g| g.name.as_str()).collect();

    let path = dir.join(TRIALS_CSV);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["trial", "seed", "algorithm", "ue_id", "priority", "weight", "q_w", "se", "ee"])?;
    for r in report.records.iter().filter(|r| r.feasible) {
        for k in 0..r.q.len() {
            w.write_record([
                r.trial.to_string(),
                r.seed.to_string(),
                r.algorithm.to_string(),
                k.to_string(),
                names[r.groups[k]].to_string(),
                r.weights[k].to_string(),
                r.q[k].to_string(),
                r.se[k].to_string(),
                r.ee[k].to_string(),
            ])?;
        }
    }
    w.flush()?;
    written.push(path);

    let path = dir.join(RECORDS_CSV);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "trial",
        "seed",
        "algorithm",
        "feasible",
        "final_wsee",
        "final_wgee",
        "iterations",
        "converged",
        "scenario_hash",
    ])?;
    for r in &report.records {
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            r.algorithm.to_string(),
            r.feasible.to_string(),
            r.final_wsee.to_string(),
            r.final_wgee.to_string(),
            r.iterations.to_string(),
            r.converged.to_string(),
            r.scenario_hash.clone(),
        ])?;
    }
    w.flush()?;
    written.push(path);

    let path = dir.join(TRACES_CSV);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["trial", "algorithm", "iteration", "objective"])?;
    for r in &report.records {
        for (i, v) in r.trace.iter().enumerate() {
            w.write_record([r.trial.to_string(), r.algorithm.to_string(), i.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    written.push(path);

    for s in &report.summaries {
        for g in &s.groups {
            for (metric, values) in [("ee", &g.ee_cdf), ("se", &g.se_cdf)] {
                let path = dir.join(format!("{CDF_PREFIX}_{}_{}_{metric}.csv", s.algorithm, g.name));
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(["value"])?;
                for v in values {
                    w.write_record([v.to_string()])?;
                }
                w.flush()?;
                written.push(path);
            }
        }
    }

    let path = dir.join(SUMMARY_JSON);
    let summary = serde_json::json!({
        "omega": report.config.omega,
        "master_seed": report.config.sim.rng_seed,
        "num_trials": report.config.num_trials,
        "algorithms": report.summaries.iter().map(|s| serde_json::json!({
            "algorithm": s.algorithm,
            "feasible_trials": s.feasible_trials,
            "infeasible_trials": s.infeasible_trials,
            "mean_wsee": s.mean_wsee,
            "mean_wgee": s.mean_wgee,
            "mean_iterations": s.mean_iterations,
            "groups": s.groups.iter().map(|g| serde_json::json!({
                "name": g.name,
                "mean_ee": g.mean_ee,
                "mean_se": g.mean_se,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
    written.push(path);
    Ok(written)
}

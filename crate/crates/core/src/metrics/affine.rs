use nalgebra::{Complex, DVector};

use super::{LsfdMatrix, SinrParts};
use crate::error::{Error, Result};
use crate::model::SystemModel;

/// Coefficients of UE k's SINR for a fixed combiner:
/// `num = signal * q_k`, `den = interference . q + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrRow {
    pub signal: f64,
    pub interference: Vec<f64>,
    pub noise: f64,
}

impl SinrRow {
    pub fn new(model: &SystemModel, k: usize, u_k: &DVector<Complex<f64>>) -> Result<Self> {
        let stats = &model.stats;
        let support = &model.scenario.assoc_sets[k];
        let m_total = model.num_aps();
        if u_k.len() != m_total {
            return Err(Error::config("u_k", format!("expected length {m_total}, got {}", u_k.len())));
        }
        for (m, u) in u_k.iter().enumerate() {
            if *u != Complex::new(0.0, 0.0) && !support.contains(&m) {
                return Err(Error::SupportViolation { ue: k, ap: m });
            }
        }
        let n = model.antennas_per_ap as f64;
        let num_ues = model.num_ues();

        let coherent: Complex<f64> = support.iter().map(|&m| u_k[m].conj() * stats.gamma[m][k]).sum();
        let signal = coherent.norm_sqr();

        let mut interference: Vec<f64> = (0..num_ues)
            .map(|j| {
                support
                    .iter()
                    .map(|&m| u_k[m].norm_sqr() * stats.beta[m][j] * stats.gamma[m][k])
                    .sum()
            })
            .collect();
        for &j in &stats.pilot_groups[k] {
            if j == k {
                continue;
            }
            let ratio = stats.snr_ratio_sqrt(j, k);
            let contaminated: Complex<f64> = support
                .iter()
                .map(|&m| u_k[m].conj() * (stats.gamma[m][k] * ratio * stats.beta[m][j] / stats.beta[m][k]))
                .sum();
            interference[j] += contaminated.norm_sqr() / n;
        }

        let noise = model.noise_power / (n * n)
            * support
                .iter()
                .map(|&m| u_k[m].norm_sqr() * stats.gamma[m][k])
                .sum::<f64>();

        Ok(SinrRow {
            signal,
            interference,
            noise,
        })
    }

    pub fn numerator(&self, k: usize, q: &[f64]) -> f64 {
        self.signal * q[k]
    }

    pub fn denominator(&self, q: &[f64]) -> f64 {
        self.interference.iter().zip(q).map(|(c, x)| c * x).sum::<f64>() + self.noise
    }

    pub fn parts(&self, k: usize, q: &[f64]) -> SinrParts {
        SinrParts {
            numerator: self.numerator(k, q),
            denominator: self.denominator(q),
        }
    }
}

/// All K SINR rows for a fixed LSFD matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSinr {
    pub rows: Vec<SinrRow>,
}

impl AffineSinr {
    pub fn new(model: &SystemModel, u: &LsfdMatrix) -> Result<Self> {
        let rows = (0..model.num_ues())
            .map(|k| SinrRow::new(model, k, &u.column(k)))
            .collect::<Result<_>>()?;
        Ok(AffineSinr { rows })
    }

    pub fn num_ues(&self) -> usize {
        self.rows.len()
    }

    pub fn parts(&self, k: usize, q: &[f64]) -> SinrParts {
        self.rows[k].parts(k, q)
    }

    pub fn sinr(&self, k: usize, q: &[f64]) -> f64 {
        self.parts(k, q).sinr()
    }
}

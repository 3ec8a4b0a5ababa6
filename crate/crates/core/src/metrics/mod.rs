//! Closed-form uplink SINR, spectral and energy efficiency, and the optimal
//! LSFD combiner, all driven by channel statistics only.

mod affine;
mod lsfd;

pub use affine::{AffineSinr, SinrRow};
pub use lsfd::{equal_gain_lsfd, optimal_lsfd, optimal_lsfd_matrix};

use std::ops::Deref;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::scenario::UeProfile;

/// Per-UE transmit signal powers in watts, `0 <= q_k <= p_max_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerVector(Vec<f64>);

impl PowerVector {
    pub fn new(q: Vec<f64>, p_max: &[f64]) -> Result<Self> {
        if q.len() != p_max.len() {
            return Err(Error::config("q", "length must equal the number of UEs"));
        }
        for (k, (&qk, &pk)) in q.iter().zip(p_max).enumerate() {
            if !(qk >= 0.0 && qk <= pk) {
                return Err(Error::config(format!("q[{k}]"), format!("{qk} outside [0, {pk}]")));
            }
        }
        Ok(PowerVector(q))
    }

    pub fn full(p_max: &[f64]) -> Self {
        PowerVector(p_max.to_vec())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PowerVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// LSFD combining matrix `U` (M x K). Column k is nonzero only on the serving
/// cluster of UE k and has unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct LsfdMatrix {
    pub columns: DMatrix<Complex<f64>>,
}

impl LsfdMatrix {
    pub fn zeros(num_aps: usize, num_ues: usize) -> Self {
        LsfdMatrix {
            columns: DMatrix::zeros(num_aps, num_ues),
        }
    }

    pub fn column(&self, k: usize) -> DVector<Complex<f64>> {
        self.columns.column(k).into_owned()
    }

    pub fn set_column(&mut self, k: usize, u: &DVector<Complex<f64>>) {
        self.columns.set_column(k, u);
    }

    pub fn num_ues(&self) -> usize {
        self.columns.ncols()
    }
}

/// Numerator and denominator of the closed-form SINR; both are affine in `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrParts {
    pub numerator: f64,
    pub denominator: f64,
}

impl SinrParts {
    pub fn sinr(&self) -> f64 {
        self.numerator / self.denominator
    }
}

/// Closed-form SINR parts of UE k under local MRC and the LSFD vector `u_k`.
pub fn sinr_parts(model: &SystemModel, k: usize, q: &[f64], u_k: &DVector<Complex<f64>>) -> Result<SinrParts> {
    Ok(SinrRow::new(model, k, u_k)?.parts(k, q))
}

pub fn se_from_sinr(prelog: f64, sinr: f64) -> f64 {
    prelog * (1.0 + sinr).log2()
}

/// Uplink SE in bits/s/Hz.
pub fn se_ul(model: &SystemModel, k: usize, q: &[f64], u_k: &DVector<Complex<f64>>) -> Result<f64> {
    Ok(se_from_sinr(model.prelog(), sinr_parts(model, k, q, u_k)?.sinr()))
}

/// `q_k / zeta_k + P_CP,k`.
pub fn ue_power(q_k: f64, profile: &UeProfile) -> f64 {
    q_k / profile.pa_efficiency + profile.circuit_power
}

/// Energy efficiency `B * SE_k / P_k` in bits/J.
pub fn energy_efficiency(bandwidth_hz: f64, se: f64, power: f64) -> f64 {
    bandwidth_hz * se / power
}

pub fn ee_k(model: &SystemModel, k: usize, q: &[f64], u_k: &DVector<Complex<f64>>) -> Result<f64> {
    let se = se_ul(model, k, q, u_k)?;
    Ok(energy_efficiency(model.bandwidth_hz, se, ue_power(q[k], &model.profiles()[k])))
}

/// `sum_k w_k EE_k`.
pub fn wsee(weights: &[f64], ee: &[f64]) -> f64 {
    weights.iter().zip(ee).map(|(w, e)| w * e).sum()
}

/// `sum_k w_k SE_k / sum_k P_k`, scaled by the bandwidth.
pub fn wgee(bandwidth_hz: f64, weights: &[f64], se: &[f64], power: &[f64]) -> f64 {
    let rate: f64 = weights.iter().zip(se).map(|(w, s)| w * s).sum();
    bandwidth_hz * rate / power.iter().sum::<f64>()
}

/// Every per-UE and network metric at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub sinr: Vec<f64>,
    pub se: Vec<f64>,
    pub power: Vec<f64>,
    pub ee: Vec<f64>,
    pub wsee: f64,
    pub wgee: f64,
}

impl Evaluation {
    pub fn new(model: &SystemModel, affine: &AffineSinr, q: &[f64]) -> Self {
        let prelog = model.prelog();
        let b = model.bandwidth_hz;
        let w = model.weights();
        let sinr: Vec<f64> = (0..model.num_ues()).map(|k| affine.sinr(k, q)).collect();
        let se: Vec<f64> = sinr.iter().map(|&s| se_from_sinr(prelog, s)).collect();
        let power: Vec<f64> = model.profiles().iter().zip(q).map(|(p, &qk)| ue_power(qk, p)).collect();
        let ee: Vec<f64> = se.iter().zip(&power).map(|(&s, &p)| energy_efficiency(b, s, p)).collect();
        Evaluation {
            wsee: wsee(&w, &ee),
            wgee: wgee(b, &w, &se, &power),
            sinr,
            se,
            power,
            ee,
        }
    }

    pub fn at(model: &SystemModel, q: &[f64], u: &LsfdMatrix) -> Result<Self> {
        Ok(Self::new(model, &AffineSinr::new(model, u)?, q))
    }
}

//! Fractional-programming auxiliaries.
//!
//! Scalar forms work on one ratio; the `update_*` functions evaluate them for
//! every UE at `(q, U)`. Rates here are plain `log2(1 + SINR)`, without the
//! pilot prelog or the bandwidth: both are common positive factors of every
//! ratio and are applied only when reporting WSEE/WGEE.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{ue_power, AffineSinr, SinrParts};
use crate::model::SystemModel;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuxState {
    /// Dinkelbach-like ratios.
    pub t: Vec<f64>,
    /// Outer (EE) quadratic-transform auxiliaries.
    pub y: Vec<f64>,
    /// Inner (SINR) quadratic-transform auxiliaries.
    pub z: Vec<f64>,
    /// Global ratio, broadcast to all K slots.
    pub s: Vec<f64>,
}

pub fn log_rate(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

/// `t = log2(1 + SINR) / P`.
pub fn dinkelbach_ratio(rate: f64, power: f64) -> f64 {
    rate / power
}

/// `y = sqrt(log2(1 + SINR)) / P`.
pub fn ee_auxiliary(rate: f64, power: f64) -> f64 {
    rate.sqrt() / power
}

/// `z = sqrt(num) / den`.
pub fn sinr_auxiliary(parts: SinrParts) -> f64 {
    parts.numerator.sqrt() / parts.denominator
}

/// `2 z sqrt(num) - z^2 den`; never exceeds `num / den` and touches it at the
/// auxiliary update.
pub fn inner_qt(parts: SinrParts, z: f64) -> f64 {
    2.0 * z * parts.numerator.sqrt() - z * z * parts.denominator
}

/// `F = 2 y sqrt(log2(1 + SINR)) - y^2 P`.
pub fn surrogate_f(rate: f64, power: f64, y: f64) -> f64 {
    2.0 * y * rate.sqrt() - y * y * power
}

/// `G = 2 y sqrt(log2(1 + 2 z sqrt(num) - z^2 den)) - y^2 P`.
///
/// Defined only where the inner transform is nonnegative; elsewhere the square
/// root of the logarithm does not exist and the UE index is reported.
pub fn surrogate_g(ue: usize, parts: SinrParts, power: f64, y: f64, z: f64) -> Result<f64> {
    let inner = inner_qt(parts, z);
    if !(inner >= 0.0) {
        return Err(Error::SurrogateDomain { ue, inner });
    }
    Ok(2.0 * y * log_rate(inner).sqrt() - y * y * power)
}

/// `s = sum_k w_k rate_k / sum_k P_k`.
pub fn global_ratio(weights: &[f64], rates: &[f64], powers: &[f64]) -> f64 {
    let num: f64 = weights.iter().zip(rates).map(|(w, r)| w * r).sum();
    num / powers.iter().sum::<f64>()
}

fn rates(affine: &AffineSinr, q: &[f64]) -> Vec<f64> {
    (0..affine.num_ues()).map(|k| log_rate(affine.sinr(k, q))).collect()
}

fn powers(model: &SystemModel, q: &[f64]) -> Vec<f64> {
    model.profiles().iter().zip(q).map(|(p, &qk)| ue_power(qk, p)).collect()
}

pub fn update_t(model: &SystemModel, affine: &AffineSinr, q: &[f64]) -> Vec<f64> {
    rates(affine, q)
        .into_iter()
        .zip(powers(model, q))
        .map(|(r, p)| dinkelbach_ratio(r, p))
        .collect()
}

pub fn update_y(model: &SystemModel, affine: &AffineSinr, q: &[f64]) -> Vec<f64> {
    rates(affine, q)
        .into_iter()
        .zip(powers(model, q))
        .map(|(r, p)| ee_auxiliary(r, p))
        .collect()
}

pub fn update_z(affine: &AffineSinr, q: &[f64]) -> Vec<f64> {
    (0..affine.num_ues()).map(|k| sinr_auxiliary(affine.parts(k, q))).collect()
}

/// Scalar global ratio broadcast into a K-vector.
pub fn update_s(model: &SystemModel, affine: &AffineSinr, q: &[f64]) -> Vec<f64> {
    let s = global_ratio(&model.weights(), &rates(affine, q), &powers(model, q));
    vec![s; model.num_ues()]
}

/// `sum_k w_k G_k`.
pub fn weighted_g(model: &SystemModel, affine: &AffineSinr, q: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (k, p) in model.profiles().iter().enumerate() {
        total += p.weight * surrogate_g(k, affine.parts(k, q), ue_power(q[k], p), y[k], z[k])?;
    }
    Ok(total)
}

/// `sum_k w_k F_k`.
pub fn weighted_f(model: &SystemModel, affine: &AffineSinr, q: &[f64], y: &[f64]) -> f64 {
    rates(affine, q)
        .into_iter()
        .zip(powers(model, q))
        .zip(model.profiles())
        .zip(y)
        .map(|(((r, pw), prof), &yk)| prof.weight * surrogate_f(r, pw, yk))
        .sum()
}

//! Reference implementations written directly from the model formulas, kept
//! apart from the library code they check.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use wsee_core::scenario::PilotSnrMode;
use wsee_core::{LsfdMatrix, SystemModel};

pub fn gamma(model: &SystemModel) -> Vec<Vec<f64>> {
    let s = &model.scenario;
    let tau = model.pilot_len as f64;
    let rho: Vec<f64> = s.ue_profiles.iter().map(|p| p.pilot_snr).collect();
    let common = model.stats.pilot_snr_mode == PilotSnrMode::Common;
    s.beta
        .iter()
        .map(|row| {
            (0..s.num_ues())
                .map(|k| {
                    let mut den = 1.0;
                    for j in 0..s.num_ues() {
                        if s.pilot_index[j] == s.pilot_index[k] {
                            den += tau * if common { rho[k] } else { rho[j] } * row[j];
                        }
                    }
                    tau * rho[k] * row[k] * row[k] / den
                })
                .collect()
        })
        .collect()
}

/// `(numerator, denominator)` of UE k's SINR.
pub fn sinr_parts(model: &SystemModel, g: &[Vec<f64>], k: usize, q: &[f64], u: &DVector<Complex<f64>>) -> (f64, f64) {
    let s = &model.scenario;
    let n = model.antennas_per_ap as f64;
    let big_m = s.num_aps();
    let rho: Vec<f64> = s.ue_profiles.iter().map(|p| p.pilot_snr).collect();
    let common = model.stats.pilot_snr_mode == PilotSnrMode::Common;
    let mut coherent = Complex::new(0.0, 0.0);
    for m in 0..big_m {
        coherent += u[m].conj() * g[m][k];
    }
    let num = q[k] * coherent.norm_sqr();
    let mut den = 0.0;
    for (j, qj) in q.iter().enumerate() {
        for m in 0..big_m {
            den += qj * u[m].norm_sqr() * s.beta[m][j] * g[m][k];
        }
    }
    for j in 0..s.num_ues() {
        if j == k || s.pilot_index[j] != s.pilot_index[k] {
            continue;
        }
        let ratio = if common { 1.0 } else { (rho[j] / rho[k]).sqrt() };
        let mut c = Complex::new(0.0, 0.0);
        for m in 0..big_m {
            c += u[m].conj() * (g[m][k] * ratio * s.beta[m][j] / s.beta[m][k]);
        }
        den += q[j] * c.norm_sqr() / n;
    }
    let mut noise = 0.0;
    for m in 0..big_m {
        noise += u[m].norm_sqr() * g[m][k];
    }
    den += model.noise_power / (n * n) * noise;
    (num, den)
}

pub fn sinr(model: &SystemModel, g: &[Vec<f64>], k: usize, q: &[f64], u: &DVector<Complex<f64>>) -> f64 {
    let (a, b) = sinr_parts(model, g, k, q, u);
    a / b
}

pub fn power(model: &SystemModel, k: usize, q: f64) -> f64 {
    let p = &model.profiles()[k];
    q / p.pa_efficiency + p.circuit_power
}

pub fn prelog(model: &SystemModel) -> f64 {
    (model.coherence_len - model.pilot_len) as f64 / model.coherence_len as f64
}

/// Plain `log2(1 + SINR)` per UE.
pub fn rates(model: &SystemModel, g: &[Vec<f64>], q: &[f64], u: &LsfdMatrix) -> Vec<f64> {
    (0..model.num_ues()).map(|k| (1.0 + sinr(model, g, k, q, &u.column(k))).log2()).collect()
}

/// Weighted sum of `B * prelog * log2(1 + SINR_k) / P_k`, bits/J.
pub fn wsee(model: &SystemModel, g: &[Vec<f64>], q: &[f64], u: &LsfdMatrix) -> f64 {
    let r = rates(model, g, q, u);
    (0..model.num_ues())
        .map(|k| model.profiles()[k].weight * model.bandwidth_hz * prelog(model) * r[k] / power(model, k, q[k]))
        .sum()
}

/// `sum_k w_k log2(1 + SINR_k) / P_k` without the reporting constants.
pub fn ratio_sum(model: &SystemModel, g: &[Vec<f64>], q: &[f64], u: &LsfdMatrix) -> f64 {
    let r = rates(model, g, q, u);
    (0..model.num_ues()).map(|k| model.profiles()[k].weight * r[k] / power(model, k, q[k])).sum()
}

/// `sum_k w_k G_k`; `None` where an inner transform turns negative.
pub fn weighted_g(model: &SystemModel, g: &[Vec<f64>], q: &[f64], u: &LsfdMatrix, y: &[f64], z: &[f64]) -> Option<f64> {
    let mut total = 0.0;
    for k in 0..model.num_ues() {
        let (a, b) = sinr_parts(model, g, k, q, &u.column(k));
        let inner = 2.0 * z[k] * a.sqrt() - z[k] * z[k] * b;
        if inner < 0.0 {
            return None;
        }
        let gk = 2.0 * y[k] * (1.0 + inner).log2().sqrt() - y[k] * y[k] * power(model, k, q[k]);
        total += model.profiles()[k].weight * gk;
    }
    Some(total)
}

pub fn y_star(model: &SystemModel, g: &[Vec<f64>], q: &[f64], u: &LsfdMatrix) -> Vec<f64> {
    let r = rates(model, g, q, u);
    (0..model.num_ues()).map(|k| r[k].sqrt() / power(model, k, q[k])).collect()
}

pub fn z_star(model: &SystemModel, g: &[Vec<f64>], q: &[f64], u: &LsfdMatrix) -> Vec<f64> {
    (0..model.num_ues())
        .map(|k| {
            let (a, b) = sinr_parts(model, g, k, q, &u.column(k));
            a.sqrt() / b
        })
        .collect()
}

/// Golden-section maximizer of a unimodal function on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..400 {
        if b - a <= 1e-15 * b.abs() {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Central-difference Hessian; `None` if any stencil point leaves the domain.
pub fn fd_hessian(f: impl Fn(&[f64]) -> Option<f64>, x: &[f64], h: &[f64]) -> Option<DMatrix<f64>> {
    let n = x.len();
    let mut out = DMatrix::zeros(n, n);
    let eval = |si: f64, i: usize, sj: f64, j: usize| {
        let mut p = x.to_vec();
        p[i] += si * h[i];
        p[j] += sj * h[j];
        f(&p)
    };
    for i in 0..n {
        for j in i..n {
            let v = (eval(1.0, i, 1.0, j)? - eval(1.0, i, -1.0, j)? - eval(-1.0, i, 1.0, j)? + eval(-1.0, i, -1.0, j)?)
                / (4.0 * h[i] * h[j]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Some(out)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

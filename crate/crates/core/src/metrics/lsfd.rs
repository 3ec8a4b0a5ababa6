use nalgebra::{Complex, DMatrix, DVector};

use super::LsfdMatrix;
use crate::error::{Error, Result};
use crate::model::SystemModel;

/// Closed-form LSFD vector of UE k for fixed powers.
///
/// On the serving cluster the SINR is the generalized Rayleigh quotient
/// `q_k |a^H u|^2 / (u^H B u)` with `a_m = gamma_mk` and
/// `B = diag(sum_j q_j beta_mj gamma_mk + sigma^2 gamma_mk / N^2)
///      + (1/N) sum_{j in P_k \ k} q_j c_j c_j^T`,
/// whose maximizer is `B^{-1} a`. The result is normalized to unit length and
/// is zero off the cluster.
pub fn optimal_lsfd(model: &SystemModel, k: usize, q: &[f64]) -> Result<DVector<Complex<f64>>> {
    let stats = &model.stats;
    let support = &model.scenario.assoc_sets[k];
    let s = support.len();
    let n = model.antennas_per_ap as f64;
    let mut full = DVector::from_element(model.num_aps(), Complex::new(0.0, 0.0));
    if s == 1 {
        full[support[0]] = Complex::new(1.0, 0.0);
        return Ok(full);
    }

    let a = DVector::from_iterator(s, support.iter().map(|&m| stats.gamma[m][k]));
    let mut b = DMatrix::<f64>::zeros(s, s);
    for (i, &m) in support.iter().enumerate() {
        let interference: f64 = q.iter().enumerate().map(|(j, &qj)| qj * stats.beta[m][j]).sum();
        b[(i, i)] = stats.gamma[m][k] * (interference + model.noise_power / (n * n));
    }
    for &j in &stats.pilot_groups[k] {
        if j == k || q[j] == 0.0 {
            continue;
        }
        let ratio = stats.snr_ratio_sqrt(j, k);
        let c = DVector::from_iterator(
            s,
            support.iter().map(|&m| stats.gamma[m][k] * ratio * stats.beta[m][j] / stats.beta[m][k]),
        );
        b.ger(q[j] / n, &c, &c, 1.0);
    }

    // Rescale so the factorization works on O(1) entries; the direction is unchanged.
    let scale = b.diagonal().max();
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::DegenerateStatistics { ue: k });
    }
    b /= scale;
    let a_scale = a.max();
    let chol = b.cholesky().ok_or(Error::DegenerateStatistics { ue: k })?;
    let mut u = chol.solve(&(a / a_scale));
    let norm = u.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::DegenerateStatistics { ue: k });
    }
    u /= norm;
    for (i, &m) in support.iter().enumerate() {
        full[m] = Complex::new(u[i], 0.0);
    }
    Ok(full)
}

pub fn optimal_lsfd_matrix(model: &SystemModel, q: &[f64]) -> Result<LsfdMatrix> {
    let mut u = LsfdMatrix::zeros(model.num_aps(), model.num_ues());
    for k in 0..model.num_ues() {
        u.set_column(k, &optimal_lsfd(model, k, q)?);
    }
    Ok(u)
}

/// `u_k = 1 / sqrt(|M_k|)` on the cluster; reference combiner for comparisons.
pub fn equal_gain_lsfd(model: &SystemModel) -> LsfdMatrix {
    let mut u = LsfdMatrix::zeros(model.num_aps(), model.num_ues());
    for (k, support) in model.scenario.assoc_sets.iter().enumerate() {
        let v = 1.0 / (support.len() as f64).sqrt();
        for &m in support {
            u.columns[(m, k)] = Complex::new(v, 0.0);
        }
    }
    u
}

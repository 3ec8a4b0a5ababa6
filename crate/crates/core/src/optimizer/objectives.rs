use crate::metrics::{ue_power, AffineSinr};
use crate::model::SystemModel;

/// Smooth objective over the power vector. `value` returns `None` outside the
/// objective's domain.
pub trait PowerObjective {
    fn value(&self, q: &[f64]) -> Option<f64>;
    fn gradient(&self, q: &[f64], grad: &mut [f64]);
}

/// Outer layer wrapped around the inner SINR transform.
#[derive(Debug, Clone, PartialEq)]
pub enum OuterTransform {
    /// `sum_k w_k (2 y_k sqrt(log2(1 + x_k)) - y_k^2 P_k)`.
    NestedQt { y: Vec<f64> },
    /// `sum_k w_k (log2(1 + x_k) - t_k P_k)`.
    DinkelbachLike { t: Vec<f64> },
    /// `sum_k w_k log2(1 + x_k) - s sum_k P_k`.
    Global { s: f64 },
}

/// Concave surrogate in `q` obtained by replacing every SINR with its inner
/// quadratic transform `x_k = 2 z_k sqrt(num_k) - z_k^2 den_k` for fixed
/// `U` and `z`.
pub struct ConcaveSurrogate<'a> {
    model: &'a SystemModel,
    affine: &'a AffineSinr,
    z: &'a [f64],
    outer: OuterTransform,
}

impl<'a> ConcaveSurrogate<'a> {
    pub fn new(model: &'a SystemModel, affine: &'a AffineSinr, z: &'a [f64], outer: OuterTransform) -> Self {
        ConcaveSurrogate {
            model,
            affine,
            z,
            outer,
        }
    }

    fn inner(&self, k: usize, q: &[f64]) -> f64 {
        crate::fp::inner_qt(self.affine.parts(k, q), self.z[k])
    }

    /// Whether UE k contributes to the objective through its rate term.
    fn active(&self, k: usize) -> bool {
        let w = self.model.profiles()[k].weight;
        match &self.outer {
            OuterTransform::NestedQt { y } => w > 0.0 && y[k] > 0.0,
            _ => w > 0.0,
        }
    }
}

impl PowerObjective for ConcaveSurrogate<'_> {
    fn value(&self, q: &[f64]) -> Option<f64> {
        let profiles = self.model.profiles();
        let mut total = 0.0;
        let mut power_sum = 0.0;
        for (k, p) in profiles.iter().enumerate() {
            let power = ue_power(q[k], p);
            power_sum += power;
            let x = if self.active(k) { self.inner(k, q) } else { 0.0 };
            let term = match &self.outer {
                OuterTransform::NestedQt { y } => {
                    if self.active(k) && !(x > 0.0) {
                        return None;
                    }
                    2.0 * y[k] * (1.0 + x).log2().sqrt() - y[k] * y[k] * power
                }
                OuterTransform::DinkelbachLike { t } => {
                    if !(x > -1.0) {
                        return None;
                    }
                    (1.0 + x).log2() - t[k] * power
                }
                OuterTransform::Global { .. } => {
                    if !(x > -1.0) {
                        return None;
                    }
                    (1.0 + x).log2()
                }
            };
            total += p.weight * term;
        }
        if let OuterTransform::Global { s } = &self.outer {
            total -= s * power_sum;
        }
        Some(total)
    }

    fn gradient(&self, q: &[f64], grad: &mut [f64]) {
        let profiles = self.model.profiles();
        let ln2 = std::f64::consts::LN_2;
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (k, p) in profiles.iter().enumerate() {
            let w = p.weight;
            // power terms
            let dpower = 1.0 / p.pa_efficiency;
            match &self.outer {
                OuterTransform::NestedQt { y } => grad[k] -= w * y[k] * y[k] * dpower,
                OuterTransform::DinkelbachLike { t } => grad[k] -= w * t[k] * dpower,
                OuterTransform::Global { s } => grad[k] -= s * dpower,
            }
            if !self.active(k) {
                continue;
            }
            let x = self.inner(k, q);
            let dfdx = match &self.outer {
                OuterTransform::NestedQt { y } => y[k] / ((1.0 + x).log2().sqrt() * (1.0 + x) * ln2),
                _ => 1.0 / ((1.0 + x) * ln2),
            };
            let row = &self.affine.rows[k];
            let zk = self.z[k];
            // dx_k/dq_k from the coherent term
            if q[k] > 0.0 {
                grad[k] += w * dfdx * zk * (row.signal / q[k]).sqrt();
            }
            for (j, c) in row.interference.iter().enumerate() {
                grad[j] -= w * dfdx * zk * zk * c;
            }
        }
    }
}

/// Affine QoS rows `coeffs . q + offset >= 0`, scaled by the UE's noise term.
#[derive(Debug, Clone, PartialEq)]
pub struct QosRows {
    pub coeffs: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

impl QosRows {
    /// `num_k - theta_k den_k >= 0` for each UE with a positive rate target.
    pub fn new(model: &SystemModel, affine: &AffineSinr) -> Self {
        let mut coeffs = Vec::new();
        let mut offset = Vec::new();
        for (k, row) in affine.rows.iter().enumerate() {
            let theta = model.qos_threshold(k);
            if theta <= 0.0 {
                continue;
            }
            let scale = 1.0 / row.noise;
            let mut c: Vec<f64> = row.interference.iter().map(|v| -theta * v * scale).collect();
            c[k] += row.signal * scale;
            coeffs.push(c);
            offset.push(-theta * row.noise * scale);
        }
        QosRows { coeffs, offset }
    }

    pub fn len(&self) -> usize {
        self.offset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offset.is_empty()
    }

    pub fn slack(&self, i: usize, q: &[f64]) -> f64 {
        self.coeffs[i].iter().zip(q).map(|(c, x)| c * x).sum::<f64>() + self.offset[i]
    }
}

/// `f(q) + mu sum_i log(slack_i(q))`.
pub struct Barrier<'a, F: PowerObjective> {
    pub inner: &'a F,
    pub rows: &'a QosRows,
    pub mu: f64,
}

impl<F: PowerObjective> PowerObjective for Barrier<'_, F> {
    fn value(&self, q: &[f64]) -> Option<f64> {
        let mut v = self.inner.value(q)?;
        for i in 0..self.rows.len() {
            let s = self.rows.slack(i, q);
            if !(s > 0.0) {
                return None;
            }
            v += self.mu * s.ln();
        }
        Some(v)
    }

    fn gradient(&self, q: &[f64], grad: &mut [f64]) {
        self.inner.gradient(q, grad);
        for i in 0..self.rows.len() {
            let s = self.rows.slack(i, q);
            for (g, c) in grad.iter_mut().zip(&self.rows.coeffs[i]) {
                *g += self.mu * c / s;
            }
        }
    }
}

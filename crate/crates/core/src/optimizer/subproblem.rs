//! Box-constrained maximization of a concave power objective.
//!
//! Spectral projected gradient ascent with a monotone Armijo backtracking
//! line search. Trial points outside the objective's domain are rejected by
//! shrinking the step. Affine QoS rows are handled with a log-barrier whose
//! weight is driven toward zero over a few warm-started stages.

use super::objectives::{Barrier, PowerObjective, QosRows};
use super::SolveOptions;
use crate::error::{Error, Result};

const ARMIJO: f64 = 1e-4;
const LAMBDA_MIN: f64 = 1e-14;
const LAMBDA_MAX: f64 = 1e14;
const BARRIER_STAGES: usize = 9;
/// Window and relative gain below which ascent counts as stalled at
/// floating-point resolution.
const STALL_WINDOW: usize = 20;
const STALL_GAIN: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemOutcome {
    pub q: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Infinity norm of the unit-step projected gradient at `q`.
    pub kkt_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl PowerBox {
    /// `[floor * p_max, p_max]`; a tiny positive floor keeps the square-root
    /// terms differentiable.
    pub fn new(p_max: &[f64], floor: f64) -> Self {
        PowerBox {
            lower: p_max.iter().map(|p| p * floor).collect(),
            upper: p_max.to_vec(),
        }
    }

    pub fn project(&self, q: &mut [f64]) {
        for ((x, lo), hi) in q.iter_mut().zip(&self.lower).zip(&self.upper) {
            *x = x.clamp(*lo, *hi);
        }
    }
}

fn projected_step(x: &[f64], g: &[f64], step: f64, bounds: &PowerBox) -> Vec<f64> {
    let mut target: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi + step * gi).collect();
    bounds.project(&mut target);
    target.iter_mut().zip(x).for_each(|(t, xi)| *t -= xi);
    target
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plain SPG ascent from a point inside the domain.
pub fn spg_maximize<F: PowerObjective + ?Sized>(
    obj: &F,
    start: &[f64],
    bounds: &PowerBox,
    tol: f64,
    max_iter: usize,
    shrink: f64,
) -> Result<SubproblemOutcome> {
    let n = start.len();
    let mut x = start.to_vec();
    bounds.project(&mut x);
    let mut f = obj.value(&x).ok_or(Error::InfeasibleStart)?;
    let mut g = vec![0.0; n];
    obj.gradient(&x, &mut g);
    let mut residual = inf_norm(&projected_step(&x, &g, 1.0, bounds));
    let mut lambda = if residual > 0.0 {
        (1.0 / residual).clamp(LAMBDA_MIN, LAMBDA_MAX)
    } else {
        1.0
    };
    let mut g_new = vec![0.0; n];
    let mut history = std::collections::VecDeque::with_capacity(STALL_WINDOW + 1);
    for it in 0..max_iter {
        history.push_back(f);
        if history.len() > STALL_WINDOW {
            let old = history.pop_front().unwrap_or(f);
            if f - old <= STALL_GAIN * f.abs().max(1.0) {
                return Ok(SubproblemOutcome {
                    q: x,
                    objective: f,
                    iterations: it,
                    kkt_residual: residual,
                    converged: residual <= tol,
                });
            }
        }
        if residual <= tol {
            return Ok(SubproblemOutcome {
                q: x,
                objective: f,
                iterations: it,
                kkt_residual: residual,
                converged: true,
            });
        }
        let d = projected_step(&x, &g, lambda, bounds);
        let slope = dot(&g, &d);
        let mut alpha = 1.0;
        let accepted = loop {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            bounds.project(&mut trial);
            match obj.value(&trial) {
                Some(ft) if ft >= f + ARMIJO * alpha * slope => break Some((trial, ft)),
                _ => {
                    alpha *= shrink;
                    if alpha < 1e-18 {
                        break None;
                    }
                }
            }
        };
        let Some((trial, ft)) = accepted else {
            // no further ascent representable in floating point
            return Ok(SubproblemOutcome {
                q: x,
                objective: f,
                iterations: it,
                kkt_residual: residual,
                converged: false,
            });
        };
        obj.gradient(&trial, &mut g_new);
        let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let curvature = -dot(&s, &yv);
        lambda = if curvature > 0.0 {
            (dot(&s, &s) / curvature).clamp(LAMBDA_MIN, LAMBDA_MAX)
        } else {
            LAMBDA_MAX
        };
        x = trial;
        f = ft;
        std::mem::swap(&mut g, &mut g_new);
        residual = inf_norm(&projected_step(&x, &g, 1.0, bounds));
    }
    Ok(SubproblemOutcome {
        q: x,
        objective: f,
        iterations: max_iter,
        kkt_residual: residual,
        converged: residual <= tol,
    })
}

/// Maximizes `obj` over the box and, when given, the QoS rows. Never returns a
/// point with a lower objective than `start`.
pub fn maximize<F: PowerObjective>(
    obj: &F,
    start: &[f64],
    bounds: &PowerBox,
    qos: Option<&QosRows>,
    opts: &SolveOptions,
) -> Result<SubproblemOutcome> {
    let mut x0 = start.to_vec();
    bounds.project(&mut x0);
    let f0 = obj.value(&x0).ok_or(Error::InfeasibleStart)?;
    let rows = match qos {
        Some(rows) if !rows.is_empty() => rows,
        _ => {
            let out = spg_maximize(obj, &x0, bounds, opts.inner_tolerance, opts.max_inner_iter, opts.step_shrink)?;
            return Ok(keep_ascent(out, x0, f0));
        }
    };

    let violators: Vec<usize> = (0..rows.len()).filter(|&i| rows.slack(i, &x0) < -1e-12).collect();
    if !violators.is_empty() {
        return Err(Error::InfeasibleQos { ues: violators });
    }
    if (0..rows.len()).any(|i| rows.slack(i, &x0) <= 0.0) {
        // on the boundary: the barrier has no interior start here
        return Ok(SubproblemOutcome {
            q: x0,
            objective: f0,
            iterations: 0,
            kkt_residual: f64::NAN,
            converged: false,
        });
    }

    let mut mu = 1e-3 * f0.abs().max(1e-6);
    let mut x = x0.clone();
    let mut last = None;
    let mut iterations = 0;
    for _ in 0..BARRIER_STAGES {
        let barrier = Barrier { inner: obj, rows, mu };
        let out = spg_maximize(&barrier, &x, bounds, opts.inner_tolerance, opts.max_inner_iter, opts.step_shrink)?;
        iterations += out.iterations;
        x = out.q.clone();
        last = Some(out);
        mu *= 0.1;
    }
    let last = last.expect("at least one barrier stage");
    let f = obj.value(&x).ok_or(Error::InfeasibleStart)?;
    let out = SubproblemOutcome {
        q: x,
        objective: f,
        iterations,
        kkt_residual: last.kkt_residual,
        converged: last.converged,
    };
    Ok(keep_ascent(out, x0, f0))
}

fn keep_ascent(out: SubproblemOutcome, x0: Vec<f64>, f0: f64) -> SubproblemOutcome {
    if out.objective >= f0 {
        out
    } else {
        SubproblemOutcome {
            q: x0,
            objective: f0,
            ..out
        }
    }
}

//! Alternating optimization of transmit powers and LSFD combiners.

mod objectives;
mod subproblem;

pub use objectives::{Barrier, ConcaveSurrogate, OuterTransform, PowerObjective, QosRows};
pub use subproblem::{maximize, spg_maximize, PowerBox, SubproblemOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{self, AuxState};
use crate::metrics::{optimal_lsfd_matrix, ue_power, AffineSinr, Evaluation, LsfdMatrix};
use crate::model::SystemModel;

/// Lower edge of the power box relative to `p_max`.
pub const POWER_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    NestedQt,
    DinkelbachLike,
    Wgee,
    FullPower,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::NestedQt,
        Algorithm::DinkelbachLike,
        Algorithm::Wgee,
        Algorithm::FullPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NestedQt => "nested_qt",
            Algorithm::DinkelbachLike => "dinkelbach_like",
            Algorithm::Wgee => "wgee",
            Algorithm::FullPower => "full_power",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    /// Outer stopping threshold, in the units of the traced objective (bits/J).
    pub tolerance: f64,
    pub max_iter: usize,
    /// Projected-gradient residual that ends a power subproblem.
    pub inner_tolerance: f64,
    /// Backtracking factor in (0, 1).
    pub step_shrink: f64,
    pub enforce_qos: bool,
    pub max_inner_iter: usize,
    /// Inner-transform refresh rounds for the Dinkelbach-type power steps.
    pub mm_rounds: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e3,
            max_iter: 100,
            inner_tolerance: 1e-9,
            step_shrink: 0.5,
            enforce_qos: false,
            max_inner_iter: 20_000,
            mm_rounds: 30,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::config("solve.tolerance", "must be > 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::config("solve.max_iter", "must be >= 1"));
        }
        if !(self.inner_tolerance > 0.0) {
            return Err(Error::config("solve.inner_tolerance", "must be > 0"));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::config("solve.step_shrink", "must lie in (0, 1)"));
        }
        if self.max_inner_iter == 0 || self.mm_rounds == 0 {
            return Err(Error::config("solve.max_inner_iter", "iteration budgets must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIter,
    FixedPower,
}

/// Values of `sum_k w_k G_k` around one nested-QT iteration, in update order.
/// `None` marks a point where the surrogate is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    /// `(q_i, U_i, y_i, z_i)`
    pub start: Option<f64>,
    /// `(q_i, U_{i+1}, y_i, z_i)`
    pub after_u: Option<f64>,
    /// `(q_i, U_{i+1}, y_i, z_{i+1})`
    pub after_z: Option<f64>,
    /// `(q_i, U_{i+1}, y_{i+1}, z_{i+1})`
    pub after_y: Option<f64>,
    /// `(q_{i+1}, U_{i+1}, y_{i+1}, z_{i+1})`
    pub after_q: Option<f64>,
    /// Surrogate at refreshed auxiliaries before and after the LSFD update,
    /// i.e. the rate-over-power objective at `(q_i, U_i)` and `(q_i, U_{i+1})`.
    pub refreshed_before_u: f64,
    pub refreshed_after_u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub q: Vec<f64>,
    pub u: LsfdMatrix,
    pub aux: AuxState,
    /// WSEE (or WGEE for [`Algorithm::Wgee`]) at the start and after every iteration.
    pub objective_trace: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Only filled by the nested-QT algorithm.
    pub chain: Vec<ChainStep>,
}

impl SolverState {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }

    pub fn evaluate(&self, model: &SystemModel) -> Result<Evaluation> {
        Evaluation::at(model, &self.q, &self.u)
    }
}

/// Per-UE QoS check at full power with the optimal combiner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosReport {
    pub thresholds: Vec<f64>,
    /// `num_k - theta_k den_k` at full power.
    pub margins: Vec<f64>,
    pub violators: Vec<usize>,
}

impl QosReport {
    pub fn feasible(&self) -> bool {
        self.violators.is_empty()
    }
}

pub fn check_qos_feasibility(model: &SystemModel) -> Result<QosReport> {
    let q = model.p_max();
    let affine = AffineSinr::new(model, &optimal_lsfd_matrix(model, &q)?)?;
    let thresholds: Vec<f64> = (0..model.num_ues()).map(|k| model.qos_threshold(k)).collect();
    let margins: Vec<f64> = thresholds
        .iter()
        .enumerate()
        .map(|(k, th)| {
            let p = affine.parts(k, &q);
            p.numerator - th * p.denominator
        })
        .collect();
    let violators = margins
        .iter()
        .enumerate()
        .filter(|(_, m)| **m < 0.0)
        .map(|(k, _)| k)
        .collect();
    Ok(QosReport {
        thresholds,
        margins,
        violators,
    })
}

fn power_box(model: &SystemModel) -> PowerBox {
    PowerBox::new(&model.p_max(), POWER_FLOOR)
}

fn qos_rows(model: &SystemModel, affine: &AffineSinr, opts: &SolveOptions) -> Option<QosRows> {
    opts.enforce_qos.then(|| QosRows::new(model, affine))
}

/// Power step of the nested-QT algorithm: maximizes `sum_k w_k G_k` for fixed
/// `U`, `y`, `z`.
pub fn solve_q_nested_qt(
    model: &SystemModel,
    affine: &AffineSinr,
    q: &[f64],
    y: &[f64],
    z: &[f64],
    opts: &SolveOptions,
) -> Result<SubproblemOutcome> {
    let obj = ConcaveSurrogate::new(model, affine, z, OuterTransform::NestedQt { y: y.to_vec() });
    let rows = qos_rows(model, affine, opts);
    maximize(&obj, q, &power_box(model), rows.as_ref(), opts)
}

/// Value of `sum_k w_k (log2(1 + SINR_k) - t_k P_k)`.
pub fn dinkelbach_like_objective(model: &SystemModel, affine: &AffineSinr, q: &[f64], t: &[f64]) -> f64 {
    model
        .profiles()
        .iter()
        .enumerate()
        .map(|(k, p)| p.weight * (fp::log_rate(affine.sinr(k, q)) - t[k] * ue_power(q[k], p)))
        .sum()
}

/// Value of `sum_k w_k log2(1 + SINR_k) - s sum_k P_k`.
pub fn global_dinkelbach_objective(model: &SystemModel, affine: &AffineSinr, q: &[f64], s: f64) -> f64 {
    model
        .profiles()
        .iter()
        .enumerate()
        .map(|(k, p)| p.weight * fp::log_rate(affine.sinr(k, q)) - s * ue_power(q[k], p))
        .sum()
}

/// Minorize-maximize loop: refresh `z` at the current point, maximize the
/// concave surrogate, repeat while the printed objective still improves.
fn mm_ascent(
    model: &SystemModel,
    affine: &AffineSinr,
    q: &[f64],
    opts: &SolveOptions,
    outer: OuterTransform,
    printed: impl Fn(&[f64]) -> f64,
) -> Result<SubproblemOutcome> {
    let bounds = power_box(model);
    let rows = qos_rows(model, affine, opts);
    let mut current = q.to_vec();
    bounds.project(&mut current);
    let mut value = printed(&current);
    let mut last = None;
    let mut iterations = 0;
    for _ in 0..opts.mm_rounds {
        let z = fp::update_z(affine, &current);
        let obj = ConcaveSurrogate::new(model, affine, &z, outer.clone());
        let out = maximize(&obj, &current, &bounds, rows.as_ref(), opts)?;
        iterations += out.iterations;
        let next = printed(&out.q);
        let improved = next > value;
        if improved {
            current = out.q.clone();
        }
        let gain = next - value;
        value = value.max(next);
        last = Some(out);
        if !improved || gain <= 1e-10 * value.abs().max(1.0) {
            break;
        }
    }
    let last = last.expect("mm_rounds >= 1");
    Ok(SubproblemOutcome {
        q: current,
        objective: value,
        iterations,
        kkt_residual: last.kkt_residual,
        converged: last.converged,
    })
}

/// Power step of the Dinkelbach-like algorithm for fixed `U` and `t`.
pub fn solve_q_dinkelbach_like(
    model: &SystemModel,
    affine: &AffineSinr,
    q: &[f64],
    t: &[f64],
    opts: &SolveOptions,
) -> Result<SubproblemOutcome> {
    mm_ascent(model, affine, q, opts, OuterTransform::DinkelbachLike { t: t.to_vec() }, |x| {
        dinkelbach_like_objective(model, affine, x, t)
    })
}

/// Power step of the WGEE Dinkelbach algorithm for fixed `U` and `s`.
pub fn solve_q_wgee(
    model: &SystemModel,
    affine: &AffineSinr,
    q: &[f64],
    s: f64,
    opts: &SolveOptions,
) -> Result<SubproblemOutcome> {
    mm_ascent(model, affine, q, opts, OuterTransform::Global { s }, |x| {
        global_dinkelbach_objective(model, affine, x, s)
    })
}

fn require_qos(model: &SystemModel, opts: &SolveOptions) -> Result<()> {
    if opts.enforce_qos {
        let report = check_qos_feasibility(model)?;
        if !report.feasible() {
            return Err(Error::InfeasibleQos { ues: report.violators });
        }
    }
    Ok(())
}

struct Start {
    q: Vec<f64>,
    u: LsfdMatrix,
    affine: AffineSinr,
}

fn start(model: &SystemModel, opts: &SolveOptions) -> Result<Start> {
    opts.validate()?;
    require_qos(model, opts)?;
    let q = model.p_max();
    let u = optimal_lsfd_matrix(model, &q)?;
    let affine = AffineSinr::new(model, &u)?;
    Ok(Start { q, u, affine })
}

fn converged_abs(prev: f64, next: f64, eps: f64) -> bool {
    (next - prev).abs() < eps
}

/// Dinkelbach-like WSEE maximization.
pub fn algorithm1(model: &SystemModel, opts: &SolveOptions) -> Result<SolverState> {
    let Start { mut q, mut u, affine } = start(model, opts)?;
    let mut trace = vec![Evaluation::new(model, &affine, &q).wsee];
    let mut aux = AuxState::default();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        u = optimal_lsfd_matrix(model, &q)?;
        let affine = AffineSinr::new(model, &u)?;
        aux.t = fp::update_t(model, &affine, &q);
        q = solve_q_dinkelbach_like(model, &affine, &q, &aux.t, opts)?.q;
        let value = Evaluation::new(model, &affine, &q).wsee;
        iterations += 1;
        let prev = *trace.last().unwrap();
        trace.push(value);
        if converged_abs(prev, value, opts.tolerance) {
            converged = true;
            break;
        }
    }
    Ok(finish(q, u, aux, trace, iterations, converged, Vec::new()))
}

/// Nested quadratic-transform WSEE maximization.
pub fn algorithm2(model: &SystemModel, opts: &SolveOptions) -> Result<SolverState> {
    let Start { mut q, mut u, mut affine } = start(model, opts)?;
    let mut trace = vec![Evaluation::new(model, &affine, &q).wsee];
    let mut aux = AuxState {
        y: fp::update_y(model, &affine, &q),
        z: fp::update_z(&affine, &q),
        ..AuxState::default()
    };
    let mut chain = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let g = |affine: &AffineSinr, q: &[f64], y: &[f64], z: &[f64]| fp::weighted_g(model, affine, q, y, z).ok();
    while iterations < opts.max_iter {
        let start = g(&affine, &q, &aux.y, &aux.z);
        let refreshed_before_u = fp::weighted_f(model, &affine, &q, &fp::update_y(model, &affine, &q));

        u = optimal_lsfd_matrix(model, &q)?;
        affine = AffineSinr::new(model, &u)?;
        let after_u = g(&affine, &q, &aux.y, &aux.z);
        let refreshed_after_u = fp::weighted_f(model, &affine, &q, &fp::update_y(model, &affine, &q));

        aux.z = fp::update_z(&affine, &q);
        let after_z = g(&affine, &q, &aux.y, &aux.z);
        aux.y = fp::update_y(model, &affine, &q);
        let after_y = g(&affine, &q, &aux.y, &aux.z);

        q = solve_q_nested_qt(model, &affine, &q, &aux.y, &aux.z, opts)?.q;
        let after_q = g(&affine, &q, &aux.y, &aux.z);
        chain.push(ChainStep {
            start,
            after_u,
            after_z,
            after_y,
            after_q,
            refreshed_before_u,
            refreshed_after_u,
        });

        let value = Evaluation::new(model, &affine, &q).wsee;
        iterations += 1;
        let prev = *trace.last().unwrap();
        trace.push(value);
        if value - prev < opts.tolerance {
            converged = true;
            break;
        }
    }
    Ok(finish(q, u, aux, trace, iterations, converged, chain))
}

/// Dinkelbach WGEE maximization. The trace holds WGEE values; per-UE metrics
/// are recomputed from the returned `(q, U)`.
pub fn algorithm3(model: &SystemModel, opts: &SolveOptions) -> Result<SolverState> {
    let Start { mut q, mut u, affine } = start(model, opts)?;
    let mut trace = vec![Evaluation::new(model, &affine, &q).wgee];
    let mut aux = AuxState::default();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        u = optimal_lsfd_matrix(model, &q)?;
        let affine = AffineSinr::new(model, &u)?;
        aux.s = fp::update_s(model, &affine, &q);
        q = solve_q_wgee(model, &affine, &q, aux.s[0], opts)?.q;
        let value = Evaluation::new(model, &affine, &q).wgee;
        iterations += 1;
        let prev = *trace.last().unwrap();
        trace.push(value);
        if converged_abs(prev, value, opts.tolerance) {
            converged = true;
            break;
        }
    }
    Ok(finish(q, u, aux, trace, iterations, converged, Vec::new()))
}

/// Every UE at `p_max` with the closed-form combiner.
pub fn full_power_baseline(model: &SystemModel, opts: &SolveOptions) -> Result<SolverState> {
    let Start { q, u, affine } = start(model, opts)?;
    let trace = vec![Evaluation::new(model, &affine, &q).wsee];
    Ok(SolverState {
        q,
        u,
        aux: AuxState::default(),
        objective_trace: trace,
        iterations_used: 0,
        converged: true,
        termination: Termination::FixedPower,
        chain: Vec::new(),
    })
}

pub fn run(algorithm: Algorithm, model: &SystemModel, opts: &SolveOptions) -> Result<SolverState> {
    match algorithm {
        Algorithm::NestedQt => algorithm2(model, opts),
        Algorithm::DinkelbachLike => algorithm1(model, opts),
        Algorithm::Wgee => algorithm3(model, opts),
        Algorithm::FullPower => full_power_baseline(model, opts),
    }
}

fn finish(
    q: Vec<f64>,
    u: LsfdMatrix,
    aux: AuxState,
    objective_trace: Vec<f64>,
    iterations_used: usize,
    converged: bool,
    chain: Vec<ChainStep>,
) -> SolverState {
    SolverState {
        q,
        u,
        aux,
        objective_trace,
        iterations_used,
        converged,
        termination: if converged {
            Termination::Converged
        } else {
            Termination::MaxIter
        },
        chain,
    }
}

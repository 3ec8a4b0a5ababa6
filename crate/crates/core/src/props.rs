//! Numerical property suites, runnable outside the test harness.
//!
//! Each suite draws seeded random instances and reports the worst violation
//! it saw. The `wsee props` command prints these results.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::fp;
use crate::metrics::{optimal_lsfd, optimal_lsfd_matrix, se_from_sinr, AffineSinr, SinrParts, SinrRow};
use crate::model::SystemModel;
use crate::optimizer::{self, ConcaveSurrogate, OuterTransform, PowerObjective, SolveOptions, POWER_FLOOR};
use crate::rng::{child_seed, stream, RandomStream};
use crate::scenario::{NetworkScenario, SimConfig, UeProfile};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Worst observed violation, in the units of the suite's tolerance.
    pub worst: f64,
    pub detail: String,
}

/// Number of random instances per suite.
#[derive(Debug, Clone, Copy)]
pub struct PropsBudget {
    pub scalar_cases: usize,
    pub model_cases: usize,
    pub probes: usize,
}

impl Default for PropsBudget {
    fn default() -> Self {
        PropsBudget {
            scalar_cases: 1000,
            model_cases: 100,
            probes: 1000,
        }
    }
}

/// Small contaminated network: `k` UEs on `tau_p` pilots over `m` APs.
pub fn random_model(seed: u64, m: usize, k: usize, tau_p: usize) -> SystemModel {
    let cfg = SimConfig {
        num_aps: m,
        num_ues: k,
        antennas_per_ap: 2,
        pilot_len: tau_p,
        area_side_m: 500.0,
        ..SimConfig::desk()
    };
    let noise = cfg.noise_power_w();
    let profiles = (0..k)
        .map(|i| {
            let p_max = if i % 2 == 0 { 0.5 } else { 0.2 };
            UeProfile {
                weight: 1.0 + (i % 3) as f64,
                p_max,
                min_rate: 0.5,
                pa_efficiency: 0.4,
                circuit_power: 1.0,
                pilot_snr: p_max / noise,
                group: i % 2,
            }
        })
        .collect();
    let scenario = NetworkScenario::generate(&cfg, profiles, &mut stream(seed)).expect("valid test config");
    SystemModel::new(&cfg, scenario).expect("valid test scenario")
}

fn random_q(model: &SystemModel, rng: &mut RandomStream, lo: f64, hi: f64) -> Vec<f64> {
    model.p_max().iter().map(|p| p * rng.random_range(lo..hi)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn outcome(name: &'static str, cases: usize, worst: f64, tol: f64, detail: String) -> PropertyOutcome {
    PropertyOutcome {
        name,
        passed: worst <= tol,
        cases,
        worst,
        detail,
    }
}

/// Each auxiliary update touches the original ratio and maximizes its
/// surrogate over a grid.
pub fn auxiliary_fixed_points(seed: u64, cases: usize) -> PropertyOutcome {
    let mut rng = stream(seed);
    let mut worst_touch: f64 = 0.0;
    let mut worst_grid: f64 = 0.0;
    for _ in 0..cases {
        let rate = rng.random_range(1e-3..20.0);
        let power = rng.random_range(0.5..5.0);
        let parts = SinrParts {
            numerator: rng.random_range(1e-6..1e3),
            denominator: rng.random_range(1e-6..1e3),
        };
        let t = fp::dinkelbach_ratio(rate, power);
        let y = fp::ee_auxiliary(rate, power);
        let z = fp::sinr_auxiliary(parts);
        worst_touch = worst_touch
            .max((rate - t * power).abs() / rate)
            .max(rel(fp::surrogate_f(rate, power, y), rate / power))
            .max(rel(fp::inner_qt(parts, z), parts.sinr()));
        let weights = [1.0, rng.random_range(0.1..3.0)];
        let rates = [rate, rng.random_range(1e-3..20.0)];
        let powers = [power, rng.random_range(0.5..5.0)];
        let s = fp::global_ratio(&weights, &rates, &powers);
        let wsr: f64 = weights.iter().zip(&rates).map(|(w, r)| w * r).sum();
        worst_touch = worst_touch.max((wsr - s * powers.iter().sum::<f64>()).abs() / wsr);
        for i in 0..=40 {
            let f = 0.05 * i as f64;
            let dy = fp::surrogate_f(rate, power, y * f) - fp::surrogate_f(rate, power, y);
            let dz = fp::inner_qt(parts, z * f) - fp::inner_qt(parts, z);
            worst_grid = worst_grid
                .max(dy / (rate / power))
                .max(dz / parts.sinr());
        }
    }
    let worst = worst_touch.max(worst_grid);
    outcome(
        "auxiliary_fixed_points",
        cases,
        worst,
        1e-12,
        format!("touch {worst_touch:.2e}, grid gain {worst_grid:.2e}"),
    )
}

fn weighted_g_fn<'a>(
    model: &'a SystemModel,
    affine: &'a AffineSinr,
    y: &'a [f64],
    z: &'a [f64],
) -> impl Fn(&[f64]) -> Option<f64> + 'a {
    move |q| fp::weighted_g(model, affine, q, y, z).ok()
}

fn fd_hessian(f: &dyn Fn(&[f64]) -> Option<f64>, x: &[f64], h: &[f64]) -> Option<DMatrix<f64>> {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    let at = |di: f64, i: usize, dj: f64, j: usize| {
        let mut p = x.to_vec();
        p[i] += di * h[i];
        p[j] += dj * h[j];
        f(&p)
    };
    for i in 0..n {
        for j in i..n {
            let v = (at(1.0, i, 1.0, j)? - at(1.0, i, -1.0, j)? - at(-1.0, i, 1.0, j)? + at(-1.0, i, -1.0, j)?)
                / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Some(hess)
}

/// Finite-difference Hessians of `sum_k w_k G_k` have no eigenvalue above
/// `1e-6 ||H||`, and `sqrt(num)` is midpoint concave.
pub fn surrogate_concavity(seed: u64, points: usize) -> PropertyOutcome {
    let mut rng = stream(seed);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut worst_mid: f64 = 0.0;
    let mut done = 0;
    let mut trial = 0u64;
    while done < points {
        trial += 1;
        let model = random_model(child_seed(seed, trial), 12, 4, 2);
        let anchor = random_q(&model, &mut rng, 0.2, 1.0);
        let u = optimal_lsfd_matrix(&model, &anchor).expect("positive statistics");
        let affine = AffineSinr::new(&model, &u).expect("support-respecting combiner");
        let y = fp::update_y(&model, &affine, &anchor);
        let z = fp::update_z(&affine, &anchor);
        let x = random_q(&model, &mut rng, 0.3, 0.9);
        let h: Vec<f64> = model.p_max().iter().map(|p| 1e-3 * p).collect();
        let g = weighted_g_fn(&model, &affine, &y, &z);
        let Some(hess) = fd_hessian(&g, &x, &h) else {
            continue;
        };
        let norm = hess.norm();
        let top = hess.symmetric_eigenvalues().max();
        worst = worst.max(top / norm);
        for k in 0..model.num_ues() {
            let a = random_q(&model, &mut rng, 0.0, 1.0);
            let b = random_q(&model, &mut rng, 0.0, 1.0);
            let mid: Vec<f64> = a.iter().zip(&b).map(|(p, q)| 0.5 * (p + q)).collect();
            let root = |q: &[f64]| affine.parts(k, q).numerator.sqrt();
            worst_mid = worst_mid.max(0.5 * (root(&a) + root(&b)) - root(&mid));
        }
        done += 1;
    }
    let passed = worst <= 1e-6 && worst_mid <= 1e-12;
    PropertyOutcome {
        name: "surrogate_concavity",
        passed,
        cases: points,
        worst,
        detail: format!("max eig / ||H|| = {worst:.2e}, midpoint gap {worst_mid:.2e}"),
    }
}

fn random_unit_on_support(rng: &mut RandomStream, num_aps: usize, support: &[usize]) -> DVector<Complex<f64>> {
    let mut u = DVector::from_element(num_aps, Complex::new(0.0, 0.0));
    for &m in support {
        u[m] = Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    }
    let n = u.norm();
    u / Complex::new(n, 0.0)
}

/// The closed-form combiner beats random unit probes; SINR ignores scaling.
pub fn lsfd_optimality(seed: u64, cases: usize, probes: usize) -> PropertyOutcome {
    let mut rng = stream(seed);
    let mut worst: f64 = 0.0;
    let mut worst_scale: f64 = 0.0;
    for c in 0..cases {
        let model = random_model(child_seed(seed, c as u64), 10, 4, 2);
        let q = random_q(&model, &mut rng, 0.01, 1.0);
        for k in 0..model.num_ues() {
            let u = optimal_lsfd(&model, k, &q).expect("positive statistics");
            let best = SinrRow::new(&model, k, &u).expect("on support").parts(k, &q).sinr();
            let support = &model.scenario.assoc_sets[k];
            for _ in 0..probes / model.num_ues() {
                let v = random_unit_on_support(&mut rng, model.num_aps(), support);
                let s = SinrRow::new(&model, k, &v).expect("on support").parts(k, &q).sinr();
                worst = worst.max((s - best) / best);
            }
            let scaled = &u * Complex::new(rng.random_range(0.1..10.0), rng.random_range(-3.0..3.0));
            let s = SinrRow::new(&model, k, &scaled).expect("on support").parts(k, &q).sinr();
            worst_scale = worst_scale.max(rel(s, best));
        }
    }
    let passed = worst <= 1e-9 && worst_scale <= 1e-12;
    PropertyOutcome {
        name: "lsfd_optimality",
        passed,
        cases,
        worst: worst.max(worst_scale),
        detail: format!("probe excess {worst:.2e}, scaling drift {worst_scale:.2e}"),
    }
}

/// `SE_k >= r_k` iff `num_k - theta_k den_k >= 0`.
pub fn qos_reformulation(seed: u64, cases: usize) -> PropertyOutcome {
    let mut rng = stream(seed);
    let mut mismatches = 0;
    for _ in 0..cases {
        let tc: usize = rng.random_range(20..400);
        let tp: usize = rng.random_range(1..tc);
        let prelog = 1.0 - tp as f64 / tc as f64;
        let r = rng.random_range(0.0..4.0);
        let parts = SinrParts {
            numerator: rng.random_range(0.0..100.0),
            denominator: rng.random_range(1e-3..100.0),
        };
        let theta = crate::model::sinr_threshold(r, tc, tp);
        let gap = se_from_sinr(prelog, parts.sinr()) - r;
        let affine = parts.numerator - theta * parts.denominator;
        let tie = gap.abs() <= 1e-12 * r.max(1.0) || affine.abs() <= 1e-12 * parts.numerator.max(1.0);
        if !tie && (gap >= 0.0) != (affine >= 0.0) {
            mismatches += 1;
        }
    }
    outcome("qos_reformulation", cases, mismatches as f64, 0.0, format!("{mismatches} sign mismatches"))
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-14 * b {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Power-step solver against a scalar oracle (one UE) and against random
/// feasible probes (several UEs).
pub fn subproblem_oracle(seed: u64, cases: usize, probes: usize) -> PropertyOutcome {
    let mut rng = stream(seed);
    let opts = SolveOptions::default();
    let mut worst_1d: f64 = 0.0;
    let mut worst_probe: f64 = f64::NEG_INFINITY;
    for c in 0..cases {
        let single = random_model(child_seed(seed, 2 * c as u64), 8, 1, 1);
        let q0 = single.p_max();
        let affine = AffineSinr::new(&single, &optimal_lsfd_matrix(&single, &q0).expect("stats")).expect("support");
        let z = fp::update_z(&affine, &q0);
        let y = vec![fp::update_y(&single, &affine, &q0)[0] * rng.random_range(1.0..4.0)];
        let out = optimizer::solve_q_nested_qt(&single, &affine, &q0, &y, &z, &opts).expect("solvable");
        let obj = ConcaveSurrogate::new(&single, &affine, &z, OuterTransform::NestedQt { y: y.clone() });
        let scalar = |x: f64| obj.value(&[x]).unwrap_or(f64::NEG_INFINITY);
        let best = golden_max(&scalar, POWER_FLOOR * q0[0], q0[0]);
        worst_1d = worst_1d.max(rel(out.q[0], best));

        let model = random_model(child_seed(seed, 2 * c as u64 + 1), 12, 5, 2);
        let anchor = random_q(&model, &mut rng, 0.3, 1.0);
        let affine = AffineSinr::new(&model, &optimal_lsfd_matrix(&model, &anchor).expect("stats")).expect("support");
        let z = fp::update_z(&affine, &anchor);
        let y = fp::update_y(&model, &affine, &anchor);
        let out = optimizer::solve_q_nested_qt(&model, &affine, &anchor, &y, &z, &opts).expect("solvable");
        let obj = ConcaveSurrogate::new(&model, &affine, &z, OuterTransform::NestedQt { y });
        for _ in 0..probes {
            let p = random_q(&model, &mut rng, 0.0, 1.0);
            if let Some(v) = obj.value(&p) {
                worst_probe = worst_probe.max((v - out.objective) / out.objective.abs().max(1e-300));
            }
        }
    }
    let passed = worst_1d <= 1e-6 && worst_probe <= 1e-12;
    PropertyOutcome {
        name: "subproblem_oracle",
        passed,
        cases,
        worst: worst_1d,
        detail: format!("golden-section gap {worst_1d:.2e}, best probe excess {worst_probe:.2e}"),
    }
}

/// Nested-QT traces never decrease beyond `1e-8` relative.
pub fn nested_qt_monotone(seed: u64, cases: usize) -> PropertyOutcome {
    let opts = SolveOptions::default();
    let mut worst: f64 = 0.0;
    for c in 0..cases {
        let model = random_model(child_seed(seed, c as u64), 16, 6, 3);
        let state = optimizer::algorithm2(&model, &opts).expect("feasible without QoS");
        for w in state.objective_trace.windows(2) {
            worst = worst.max((w[0] - w[1]) / w[0]);
        }
    }
    outcome("nested_qt_monotone", cases, worst, 1e-8, format!("largest relative drop {worst:.2e}"))
}

pub fn run_all(seed: u64, budget: PropsBudget) -> Vec<PropertyOutcome> {
    vec![
        auxiliary_fixed_points(seed, budget.scalar_cases),
        surrogate_concavity(seed, budget.model_cases),
        lsfd_optimality(seed, budget.model_cases, budget.probes),
        qos_reformulation(seed, budget.scalar_cases * 10),
        subproblem_oracle(seed, budget.model_cases / 4, budget.probes / 10),
        nested_qt_monotone(seed, budget.model_cases / 4),
    ]
}

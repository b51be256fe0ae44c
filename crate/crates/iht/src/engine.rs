//! Projected gradient iteration with per-step descent certificates.
//!
//! Each step maps x to H_s(x - gamma * grad f(x)) and evaluates three
//! inequalities that certified descent must satisfy whenever
//! gamma <= 1/L_s:
//!
//!   (gamma/2)(1 - L_s gamma) ||grad_{I_x u I_y} f(x)||^2 <= f(x) - f(y)
//!   (1 - L_s gamma)/(6 gamma) ||y - x||^2
//!       <= (gamma/2)(1 - L_s gamma) ||grad_{I_x u I_y} f(x)||^2
//!   (gamma/2) ||grad_{I_x} f(x)||^2 <= f(x) - f(y)
//!
//! where I_x and I_y are the canonical top-s index sets of the input and
//! output. Slacks are stored as RHS minus LHS, so certified descent means
//! every slack is nonnegative up to roundoff. The third inequality stays
//! strict at gamma = 1/L_s, where the first two degenerate to 0 <= 0.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{IhtError, Result};
use crate::ht::{ht_gradient_map, HTResult};
use crate::objective::{Objective, RestrictedConstants};
use crate::types::{top_s_index_sets, DenseVector, SparsityBudget, SupportSet};

/// Slack below which a certificate is treated as violated rather than as
/// roundoff. Only enforced while gamma is inside the certified regime.
pub const SLACK_VIOLATION_FLOOR: f64 = -1e-8;

#[derive(Clone, Copy, Debug)]
pub struct IHTConfig {
    /// Stepsize gamma > 0.
    pub gamma: f64,
    pub max_iters: usize,
    /// Stop once the iterate moves by at most this much (Euclidean norm).
    pub conv_tol: f64,
    /// Record every k-th iterate; None picks 1 for n <= 16 and 10 above.
    /// The initial and final iterates are always recorded.
    pub record_every: Option<usize>,
    /// Reject gamma above 1/L_s instead of iterating uncertified.
    pub enforce_gamma_bound: bool,
}

impl IHTConfig {
    pub fn new(gamma: f64) -> Self {
        IHTConfig {
            gamma,
            max_iters: 10_000,
            conv_tol: 1e-10,
            record_every: None,
            enforce_gamma_bound: true,
        }
    }
}

/// Quantities of one step x -> y, with slacks written as RHS - LHS.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StepCertificate {
    /// ||grad f(x)||^2 restricted to I_x union I_y.
    pub union_grad_sq: f64,
    /// ||grad f(x)||^2 restricted to I_x alone.
    pub own_grad_sq: f64,
    /// ||y - x||^2.
    pub move_sq: f64,
    pub f_before: f64,
    pub f_after: f64,
    pub eq5_slack: f64,
    pub eq6_slack: f64,
    pub eq7_slack: f64,
}

impl StepCertificate {
    /// Most negative slack with its column name.
    pub fn worst_slack(&self) -> (&'static str, f64) {
        let mut worst = ("eq5_slack", self.eq5_slack);
        if self.eq6_slack < worst.1 {
            worst = ("eq6_slack", self.eq6_slack);
        }
        if self.eq7_slack < worst.1 {
            worst = ("eq7_slack", self.eq7_slack);
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIters,
    CertificateViolation,
}

/// Record of one run: recorded iterates as (step, point) pairs, the full
/// objective and certificate sequences, and how the run ended.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub iterates: Vec<(usize, DenseVector)>,
    /// f at step 0, then after each step: length steps_taken + 1.
    pub f_values: Vec<f64>,
    /// One certificate per step taken.
    pub certificates: Vec<StepCertificate>,
    /// Steps (1-based: index of the produced iterate) where the
    /// projection had to break a magnitude tie.
    pub tie_steps: Vec<usize>,
    pub termination: Termination,
    pub final_point: DenseVector,
    pub steps_taken: usize,
}

fn gamma_upper_bound(l_s: f64) -> f64 {
    if l_s > 0.0 {
        1.0 / l_s
    } else {
        f64::INFINITY
    }
}

/// Whether the descent certificates are binding for this stepsize.
fn certified_regime(gamma: f64, l_s: f64) -> bool {
    gamma <= gamma_upper_bound(l_s) + 1e-15
}

fn check_gamma(cfg: &IHTConfig, l_s: f64) -> Result<()> {
    if !(cfg.gamma.is_finite() && cfg.gamma > 0.0) {
        return Err(IhtError::InvalidGamma(cfg.gamma));
    }
    if cfg.enforce_gamma_bound && !certified_regime(cfg.gamma, l_s) {
        return Err(IhtError::GammaAboveBound {
            gamma: cfg.gamma,
            bound: gamma_upper_bound(l_s),
        });
    }
    Ok(())
}

fn check_feasible(x: &DenseVector, budget: SparsityBudget) -> Result<()> {
    if x.len() != budget.n() {
        return Err(IhtError::DimensionMismatch {
            expected: budget.n(),
            got: x.len(),
        });
    }
    let got = x.l0_norm();
    if got > budget.s() {
        return Err(IhtError::InfeasibleStart { got, budget: budget.s() });
    }
    Ok(())
}

/// One projection step plus its certificate. Never rejects a negative
/// slack; callers decide how to react (see [`iht_step`] and [`run_iht`]).
pub(crate) fn step_inner(
    obj: &dyn Objective,
    x: &DenseVector,
    gamma: f64,
    budget: SparsityBudget,
    l_s: f64,
    step_index: usize,
) -> Result<(HTResult, StepCertificate)> {
    let f_before = obj.value(x);
    if !f_before.is_finite() {
        return Err(IhtError::NonFiniteObjective(step_index));
    }
    let grad = obj.gradient(x);
    let ht = ht_gradient_map(x, &grad, gamma, budget)?;
    let f_after = obj.value(&ht.projected);
    if !f_after.is_finite() {
        return Err(IhtError::NonFiniteObjective(step_index));
    }

    // Canonical top-s index set of the input; for inputs with fewer than
    // s nonzeros the zero coordinates tie and low indices fill the set.
    let own = top_s_index_sets(x, budget)?.into_iter().next().expect("family nonempty");
    let union = own.union(&ht.chosen);
    let sum_sq = |set: &SupportSet| set.iter().map(|&i| grad[i] * grad[i]).sum::<f64>();
    let union_grad_sq = sum_sq(&union);
    let own_grad_sq = sum_sq(&own);
    let move_sq = x
        .iter()
        .zip(ht.projected.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>();

    let descent = f_before - f_after;
    let shrink = 1.0 - l_s * gamma;
    let eq5_slack = descent - gamma / 2.0 * shrink * union_grad_sq;
    let eq6_slack = gamma / 2.0 * shrink * union_grad_sq - shrink / (6.0 * gamma) * move_sq;
    let eq7_slack = descent - gamma / 2.0 * own_grad_sq;

    let cert = StepCertificate {
        union_grad_sq,
        own_grad_sq,
        move_sq,
        f_before,
        f_after,
        eq5_slack,
        eq6_slack,
        eq7_slack,
    };
    Ok((ht, cert))
}

/// One certified step. Errors if the input is infeasible, gamma is
/// invalid (or above 1/L_s with the bound enforced), the objective turns
/// non-finite, or a certificate falls below [`SLACK_VIOLATION_FLOOR`]
/// while gamma <= 1/L_s; a violation in regime means the gradient, the
/// objective, and L_s are mutually inconsistent.
pub fn iht_step(
    obj: &dyn Objective,
    x: &DenseVector,
    cfg: &IHTConfig,
    budget: SparsityBudget,
    l_s: f64,
) -> Result<(DenseVector, StepCertificate)> {
    check_gamma(cfg, l_s)?;
    check_feasible(x, budget)?;
    let (ht, cert) = step_inner(obj, x, cfg.gamma, budget, l_s, 0)?;
    if certified_regime(cfg.gamma, l_s) {
        let (which, slack) = cert.worst_slack();
        if slack < SLACK_VIOLATION_FLOOR {
            return Err(IhtError::CertificateViolation { step: 0, which, slack });
        }
    }
    Ok((ht.projected, cert))
}

/// Runs the iteration from `x0` until the iterate moves by at most
/// conv_tol or max_iters steps elapse. A certificate violation inside the
/// certified regime ends the run with that termination status and a
/// partial trajectory instead of an error.
pub fn run_iht(
    obj: &dyn Objective,
    x0: &DenseVector,
    cfg: &IHTConfig,
    budget: SparsityBudget,
    constants: &RestrictedConstants,
) -> Result<Trajectory> {
    let l_s = constants.l_s;
    check_gamma(cfg, l_s)?;
    check_feasible(x0, budget)?;
    let record_every = cfg
        .record_every
        .unwrap_or(if budget.n() <= 16 { 1 } else { 10 })
        .max(1);
    let in_regime = certified_regime(cfg.gamma, l_s);

    let mut iterates: Vec<(usize, DenseVector)> = vec![(0, x0.clone())];
    let mut f_values = vec![obj.value(x0)];
    let mut certificates: Vec<StepCertificate> = Vec::new();
    let mut tie_steps: Vec<usize> = Vec::new();
    let mut x = x0.clone();
    let mut termination = Termination::MaxIters;
    let mut steps_taken = 0;

    for k in 0..cfg.max_iters {
        let (ht, cert) = step_inner(obj, &x, cfg.gamma, budget, l_s, k + 1)?;
        x = ht.projected;
        steps_taken = k + 1;
        f_values.push(cert.f_after);
        certificates.push(cert);
        if ht.tie_occurred {
            tie_steps.push(steps_taken);
        }
        if steps_taken % record_every == 0 {
            iterates.push((steps_taken, x.clone()));
        }

        if in_regime {
            let (_, slack) = cert.worst_slack();
            if slack < SLACK_VIOLATION_FLOOR {
                termination = Termination::CertificateViolation;
                break;
            }
        }
        if cert.move_sq.sqrt() <= cfg.conv_tol {
            termination = Termination::Converged;
            break;
        }
    }

    if iterates.last().map(|(k, _)| *k) != Some(steps_taken) {
        iterates.push((steps_taken, x.clone()));
    }
    Ok(Trajectory {
        iterates,
        f_values,
        certificates,
        tie_steps,
        termination,
        final_point: x,
        steps_taken,
    })
}

/// Ratios ||x^{k+1} - x*|| / ||x^k - x*|| over consecutive recorded
/// iterates, skipping pairs whose denominator is at most 1e-14. With
/// record_every = 1 these are the per-step convergence ratios.
pub fn qlinear_rate(traj: &Trajectory, x_star: &DenseVector) -> Vec<f64> {
    traj.iterates
        .windows(2)
        .filter_map(|w| {
            let d0 = w[0].1.dist(x_star);
            let d1 = w[1].1.dist(x_star);
            (d0 > 1e-14).then_some(d1 / d0)
        })
        .collect()
}

fn row_fields<'a>(
    traj: &'a Trajectory,
    k: usize,
    x: &DenseVector,
) -> (f64, Option<&'a StepCertificate>, Vec<usize>) {
    let cert = if k == 0 { None } else { traj.certificates.get(k - 1) };
    (traj.f_values[k], cert, x.support().one_based())
}

/// CSV rendering of the recorded iterates. Columns: step, x_1..x_n, f,
/// eq5_slack, eq6_slack, eq7_slack, support (semicolon-joined 1-based
/// indices). The step-0 row has empty slack cells since no step produced
/// it. Floats print in shortest round-trip form.
pub fn trajectory_csv_string(traj: &Trajectory) -> String {
    let n = traj.final_point.len();
    let mut out = String::new();
    out.push_str("step");
    for i in 1..=n {
        out.push_str(&format!(",x_{i}"));
    }
    out.push_str(",f,eq5_slack,eq6_slack,eq7_slack,support\n");
    for (k, x) in &traj.iterates {
        let (f, cert, support) = row_fields(traj, *k, x);
        out.push_str(&k.to_string());
        for v in x.iter() {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(",{f}"));
        match cert {
            Some(c) => out.push_str(&format!(",{},{},{}", c.eq5_slack, c.eq6_slack, c.eq7_slack)),
            None => out.push_str(",,,"),
        }
        let joined: Vec<String> = support.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!(",{}\n", joined.join(";")));
    }
    out
}

/// Writes [`trajectory_csv_string`] to a file.
pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| IhtError::io(path, e))?;
    f.write_all(trajectory_csv_string(traj).as_bytes())
        .map_err(|e| IhtError::io(path, e))
}

#[derive(Serialize)]
struct TrajectoryRow {
    step: usize,
    x: Vec<f64>,
    f: f64,
    eq5_slack: Option<f64>,
    eq6_slack: Option<f64>,
    eq7_slack: Option<f64>,
    support: Vec<usize>,
}

#[derive(Serialize)]
struct TrajectoryFile {
    version: u32,
    termination: Termination,
    steps_taken: usize,
    tie_steps: Vec<usize>,
    rows: Vec<TrajectoryRow>,
}

/// JSON rendering carrying the same rows as the CSV, plus termination
/// data.
pub fn trajectory_json_string(traj: &Trajectory) -> String {
    let rows = traj
        .iterates
        .iter()
        .map(|(k, x)| {
            let (f, cert, support) = row_fields(traj, *k, x);
            TrajectoryRow {
                step: *k,
                x: x.as_slice().to_vec(),
                f,
                eq5_slack: cert.map(|c| c.eq5_slack),
                eq6_slack: cert.map(|c| c.eq6_slack),
                eq7_slack: cert.map(|c| c.eq7_slack),
                support,
            }
        })
        .collect();
    let file = TrajectoryFile {
        version: 1,
        termination: traj.termination,
        steps_taken: traj.steps_taken,
        tie_steps: traj.tie_steps.clone(),
        rows,
    };
    serde_json::to_string_pretty(&file).expect("trajectory serializes")
}

/// Writes [`trajectory_json_string`] to a file.
pub fn write_trajectory_json(traj: &Trajectory, path: &Path) -> Result<()> {
    std::fs::write(path, trajectory_json_string(traj)).map_err(|e| IhtError::io(path, e))
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::objective::{rss_constant, FnObjective, QuadraticInstance};
    use crate::types::DenseMatrix;

    fn dv(v: &[f64]) -> DenseVector {
        DenseVector::new(v.to_vec()).unwrap()
    }

    fn paper_setup() -> (QuadraticInstance, SparsityBudget, RestrictedConstants) {
        let inst = QuadraticInstance::paper4x4();
        let budget = SparsityBudget::new(2, 4).unwrap();
        let constants = rss_constant(&inst, budget).unwrap();
        (inst, budget, constants)
    }

    // Minimizer of the built-in instance restricted to support {1, 2}:
    // the strictly stable point every certified run below homes in on.
    const TOP_POINT: [f64; 4] = [1.347522523757085, 1.0332935091926214, 0.0, 0.0];
    const SECOND_STABLE: [f64; 4] = [0.6386934513120638, 0.0, 0.0, 0.11226888751493662];
    const UNSTABLE_LOW: [f64; 4] = [0.6277894207963146, 0.0, 0.017743566001537446, 0.0];

    #[test]
    fn stable_point_is_a_fixed_point_with_zero_slacks() {
        let (inst, budget, constants) = paper_setup();
        let x = dv(&TOP_POINT);
        let cfg = IHTConfig::new(0.06);
        let (next, cert) = iht_step(&inst, &x, &cfg, budget, constants.l_s).unwrap();
        assert!(next.dist(&x) <= 1e-12);
        assert!(cert.eq5_slack.abs() <= 1e-12);
        assert!(cert.eq6_slack.abs() <= 1e-12);
        assert!(cert.eq7_slack.abs() <= 1e-12);
        assert!((cert.f_before - cert.f_after).abs() <= 1e-12);
    }

    #[test]
    fn zero_gradient_point_gives_all_zero_certificate() {
        // f(x) = ||x - c||^2 with a 2-sparse center: at x = c the gradient
        // vanishes and the step must not move.
        let c = [0.5, 0.0, -1.5, 0.0];
        let obj = FnObjective::new(
            4,
            move |x| x.iter().zip(c).map(|(v, ci)| (v - ci) * (v - ci)).sum(),
            move |x| dv(&[
                2.0 * (x[0] - c[0]),
                2.0 * (x[1] - c[1]),
                2.0 * (x[2] - c[2]),
                2.0 * (x[3] - c[3]),
            ]),
        );
        let budget = SparsityBudget::new(2, 4).unwrap();
        let cfg = IHTConfig::new(0.25);
        let x = dv(&c);
        let (next, cert) = iht_step(&obj, &x, &cfg, budget, 2.0).unwrap();
        assert_eq!(next, x);
        assert_eq!(cert.move_sq, 0.0);
        assert_eq!(cert.union_grad_sq, 0.0);
        assert_eq!(cert.eq5_slack, 0.0);
        assert_eq!(cert.eq6_slack, 0.0);
        assert_eq!(cert.eq7_slack, 0.0);
    }

    #[test]
    fn random_instances_descend_with_nonnegative_slacks() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..10 {
            let m = 8;
            let n = 8;
            let entries: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let inst = QuadraticInstance::new(
                DenseMatrix::new(m, n, entries).unwrap(),
                DenseVector::new((0..m).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap(),
            )
            .unwrap();
            let budget = SparsityBudget::new(3, n).unwrap();
            let constants = rss_constant(&inst, budget).unwrap();
            // Sweep the certified stepsize range including the endpoint,
            // where the first two certificates degenerate and the third
            // carries the descent guarantee alone.
            let frac = [0.3, 0.5, 0.9, 1.0][trial % 4];
            let mut cfg = IHTConfig::new(frac / constants.l_s);
            cfg.max_iters = 150;
            let mut x0 = vec![0.0; n];
            for slot in x0.iter_mut().take(3) {
                *slot = rng.random_range(-1.0..1.0);
            }
            let traj = run_iht(&inst, &dv(&x0), &cfg, budget, &constants).unwrap();
            assert_ne!(traj.termination, Termination::CertificateViolation);
            for w in traj.f_values.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
            for cert in &traj.certificates {
                assert!(cert.eq5_slack >= -1e-10, "eq5 {}", cert.eq5_slack);
                assert!(cert.eq6_slack >= -1e-10, "eq6 {}", cert.eq6_slack);
                assert!(cert.eq7_slack >= -1e-10, "eq7 {}", cert.eq7_slack);
            }
            for (_, x) in &traj.iterates {
                assert!(x.l0_norm() <= budget.s());
            }
        }
    }

    #[test]
    fn small_stepsize_run_from_zero_approaches_top_point() {
        let (inst, budget, constants) = paper_setup();
        let mut cfg = IHTConfig::new(0.06);
        cfg.max_iters = 400;
        cfg.conv_tol = 0.0;
        let traj = run_iht(&inst, &DenseVector::zeros(4), &cfg, budget, &constants).unwrap();
        assert_eq!(traj.termination, Termination::MaxIters);
        assert_eq!(traj.steps_taken, 400);
        let d = traj.final_point.dist(&dv(&TOP_POINT));
        // gamma = 0.06 contracts slowly: after 400 steps the iterate is
        // near the stable point but measurably short of it.
        assert!(d > 1e-4 && d < 1e-2, "distance {d}");
    }

    #[test]
    fn full_stepsize_run_from_zero_converges_to_top_point() {
        let (inst, budget, constants) = paper_setup();
        let cfg = IHTConfig::new(1.0 / constants.l_s);
        let traj = run_iht(&inst, &DenseVector::zeros(4), &cfg, budget, &constants).unwrap();
        assert_eq!(traj.termination, Termination::Converged);
        assert!(traj.final_point.dist(&dv(&TOP_POINT)) < 1e-8);
        for w in traj.f_values.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn long_small_stepsize_run_reaches_a_stable_point() {
        let (inst, budget, constants) = paper_setup();
        // Deterministic off-support perturbation of the low unstable
        // point; long horizon because the contraction factor per step is
        // about 0.986.
        let x0 = dv(&[
            UNSTABLE_LOW[0] + 0.3,
            UNSTABLE_LOW[1],
            UNSTABLE_LOW[2] - 0.2,
            UNSTABLE_LOW[3],
        ]);
        let mut cfg = IHTConfig::new(0.06);
        cfg.max_iters = 1500;
        cfg.conv_tol = 0.0;
        let traj = run_iht(&inst, &x0, &cfg, budget, &constants).unwrap();
        let d_top = traj.final_point.dist(&dv(&TOP_POINT));
        let d_second = traj.final_point.dist(&dv(&SECOND_STABLE));
        assert!(
            d_top < 1e-5 || d_second < 1e-5,
            "distances {d_top} / {d_second}"
        );
    }

    #[test]
    fn inconsistent_gradient_trips_the_certificates() {
        // Claims the ascent direction as its gradient: steps increase f,
        // which no certified step may do.
        let obj = FnObjective::new(
            3,
            |x| x.norm_sq(),
            |x| dv(&[-2.0 * x[0], -2.0 * x[1], -2.0 * x[2]]),
        );
        let budget = SparsityBudget::new(1, 3).unwrap();
        let cfg = IHTConfig::new(0.25);
        let x = dv(&[1.0, 0.0, 0.0]);
        let err = iht_step(&obj, &x, &cfg, budget, 2.0).unwrap_err();
        assert!(matches!(err, IhtError::CertificateViolation { .. }));

        let traj = run_iht(&obj, &x, &cfg, budget, &RestrictedConstants {
            l_s: 2.0,
            l_s_restricted: None,
            beta_s: None,
            s_effective: 2,
        })
        .unwrap();
        assert_eq!(traj.termination, Termination::CertificateViolation);
        assert_eq!(traj.steps_taken, 1);
    }

    #[test]
    fn gamma_validation() {
        let (inst, budget, constants) = paper_setup();
        let x0 = DenseVector::zeros(4);

        let cfg = IHTConfig::new(1.0);
        assert!(matches!(
            run_iht(&inst, &x0, &cfg, budget, &constants),
            Err(IhtError::GammaAboveBound { .. })
        ));

        let mut relaxed = IHTConfig::new(1.0);
        relaxed.enforce_gamma_bound = false;
        relaxed.max_iters = 50;
        // Outside the certified regime the run proceeds; no certificate
        // is enforced there, so it must still finish cleanly.
        let traj = run_iht(&inst, &x0, &relaxed, budget, &constants).unwrap();
        assert_ne!(traj.termination, Termination::CertificateViolation);

        for bad in [0.0, -0.5, f64::NAN] {
            let cfg = IHTConfig::new(bad);
            assert!(matches!(
                run_iht(&inst, &x0, &cfg, budget, &constants),
                Err(IhtError::InvalidGamma(_))
            ));
        }
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let (inst, budget, constants) = paper_setup();
        let cfg = IHTConfig::new(0.06);
        let err = run_iht(&inst, &dv(&[1.0, 1.0, 1.0, 0.0]), &cfg, budget, &constants).unwrap_err();
        assert!(matches!(err, IhtError::InfeasibleStart { got: 3, budget: 2 }));
    }

    #[test]
    fn qlinear_tail_is_contractive_near_the_stable_point() {
        let (inst, budget, constants) = paper_setup();
        let mut cfg = IHTConfig::new(0.06);
        cfg.max_iters = 400;
        cfg.conv_tol = 0.0;
        let traj = run_iht(&inst, &DenseVector::zeros(4), &cfg, budget, &constants).unwrap();
        let rates = qlinear_rate(&traj, &dv(&TOP_POINT));
        assert_eq!(rates.len(), 400);
        let tail = &rates[rates.len() - 20..];
        let max_tail = tail.iter().cloned().fold(0.0f64, f64::max);
        assert!(max_tail < 0.99, "tail max {max_tail}");
        assert!(max_tail > 0.97, "tail max {max_tail}");

        // Starting at the limit point produces no usable denominators.
        let fixed = run_iht(&inst, &dv(&TOP_POINT), &cfg, budget, &constants).unwrap();
        assert!(qlinear_rate(&fixed, &dv(&TOP_POINT)).iter().all(|r| *r <= 1.0));
    }

    #[test]
    fn record_every_thins_but_keeps_endpoints() {
        let (inst, budget, constants) = paper_setup();
        let mut cfg = IHTConfig::new(0.06);
        cfg.max_iters = 25;
        cfg.conv_tol = 0.0;
        cfg.record_every = Some(10);
        let traj = run_iht(&inst, &DenseVector::zeros(4), &cfg, budget, &constants).unwrap();
        let steps: Vec<usize> = traj.iterates.iter().map(|(k, _)| *k).collect();
        assert_eq!(steps, vec![0, 10, 20, 25]);
        assert_eq!(traj.f_values.len(), 26);
        assert_eq!(traj.certificates.len(), 25);
    }

    #[test]
    fn exports_round_trip_rows_and_slacks() {
        let (inst, budget, constants) = paper_setup();
        let mut cfg = IHTConfig::new(0.06);
        cfg.max_iters = 3;
        cfg.conv_tol = 0.0;
        let traj = run_iht(&inst, &DenseVector::zeros(4), &cfg, budget, &constants).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("traj.csv");
        let json_path = dir.path().join("traj.json");
        write_trajectory_csv(&traj, &csv_path).unwrap();
        write_trajectory_json(&traj, &json_path).unwrap();

        let raw = std::fs::read_to_string(&csv_path).unwrap();
        let lines: Vec<&str> = raw.lines().collect();
        assert_eq!(lines[0], "step,x_1,x_2,x_3,x_4,f,eq5_slack,eq6_slack,eq7_slack,support");
        assert_eq!(lines.len(), 1 + 4);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(&first[6..9], &["", "", ""]);
        assert_eq!(first[9], "");
        let second: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(second[0], "1");
        let slack: f64 = second[6].parse().unwrap();
        assert_relative_eq!(slack, traj.certificates[0].eq5_slack, max_relative = 1e-15);
        assert_eq!(second[9], "1;2");

        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(parsed["version"], 1);
        assert_eq!(parsed["rows"].as_array().unwrap().len(), 4);
        assert!(parsed["rows"][0]["eq5_slack"].is_null());
        assert_eq!(
            parsed["rows"][1]["eq5_slack"].as_f64().unwrap(),
            traj.certificates[0].eq5_slack
        );
        assert_eq!(parsed["termination"], "max_iters");
    }
}

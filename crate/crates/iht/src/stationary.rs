//! Stationary points of the projected iteration and their stability.
//!
//! A point is basic stationary when the gradient vanishes on its support.
//! Stability compares the smallest magnitude among the s entries a top-s
//! selection keeps against gamma times the largest off-support gradient
//! entry:
//!
//!   min(|x_i| : i in top-s of x)  vs  gamma * max(|grad_j| : j off supp)
//!
//! Strict dominance on the left is `strictly_stable`, strict dominance on
//! the right is `unstable`, and results inside a margin of 1e-12 land on
//! `stable_boundary`. A point with fewer than s nonzeros forces the left
//! side to 0, so it is stable only when the full gradient vanishes.

use std::fmt;
use std::path::Path;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{IhtError, Result};
use crate::ht::{ht_gradient_map, restrict};
use crate::linalg;
use crate::objective::{Objective, QuadraticInstance};
use crate::types::{binomial, combinations, DenseVector, SparsityBudget, SupportSet};

/// Margin separating strict stability from the boundary case. Exact
/// equality of the two sides is measure-zero but must not flip between
/// runs; anything within this band is reported as boundary.
pub const MARGIN_TOLERANCE: f64 = 1e-12;

/// Threshold under which a gradient entry counts as zero, scaled by the
/// objective's stationarity scale.
pub fn gradient_tolerance(obj: &dyn Objective) -> f64 {
    1e-9 * obj.stationarity_scale()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    StrictlyStable,
    StableBoundary,
    Unstable,
    NotStationary,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            Classification::StrictlyStable => "strictly HT-stable",
            Classification::StableBoundary => "HT-stable (boundary)",
            Classification::Unstable => "HT-unstable",
            Classification::NotStationary => "not stationary",
        };
        f.write_str(label)
    }
}

/// A candidate point with its classification evidence. `support` is the
/// exact set of nonzero coordinates; `min_abs_on_top` and
/// `gamma_max_grad_off` are the two sides of the stability comparison.
#[derive(Clone, Debug)]
pub struct StationaryPoint {
    pub point: DenseVector,
    pub support: SupportSet,
    pub grad: DenseVector,
    pub f_value: f64,
    pub classification: Classification,
    pub min_abs_on_top: f64,
    pub gamma_max_grad_off: f64,
    /// Set when the restricted normal equations that produced this point
    /// were numerically singular (condition above 1e12).
    pub degenerate: bool,
}

fn classify_inner(
    obj: &dyn Objective,
    x: DenseVector,
    gamma: f64,
    budget: SparsityBudget,
    degenerate: bool,
) -> StationaryPoint {
    let support = x.support();
    let grad = obj.gradient(&x);
    let f_value = obj.value(&x);
    let eps_g = gradient_tolerance(obj);

    let grad_on_supp = support.iter().map(|&i| grad[i].abs()).fold(0.0f64, f64::max);
    let min_abs_on_top = if x.l0_norm() < budget.s() {
        // Any top-s selection must pad with a zero coordinate.
        0.0
    } else {
        support.iter().map(|&i| x[i].abs()).fold(f64::INFINITY, f64::min)
    };
    let gamma_max_grad_off = gamma
        * support
            .complement(x.len())
            .iter()
            .map(|&j| grad[j].abs())
            .fold(0.0f64, f64::max);

    let classification = if grad_on_supp > eps_g {
        Classification::NotStationary
    } else if min_abs_on_top > gamma_max_grad_off + MARGIN_TOLERANCE {
        Classification::StrictlyStable
    } else if min_abs_on_top < gamma_max_grad_off - MARGIN_TOLERANCE {
        Classification::Unstable
    } else {
        Classification::StableBoundary
    };

    StationaryPoint {
        point: x,
        support,
        grad,
        f_value,
        classification,
        min_abs_on_top,
        gamma_max_grad_off,
        degenerate,
    }
}

/// Classifies an arbitrary feasible point at stepsize `gamma`.
pub fn classify(
    obj: &dyn Objective,
    x: &DenseVector,
    gamma: f64,
    budget: SparsityBudget,
) -> Result<StationaryPoint> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(IhtError::InvalidGamma(gamma));
    }
    if x.len() != budget.n() {
        return Err(IhtError::DimensionMismatch {
            expected: budget.n(),
            got: x.len(),
        });
    }
    if x.l0_norm() > budget.s() {
        return Err(IhtError::InfeasibleStart {
            got: x.l0_norm(),
            budget: budget.s(),
        });
    }
    Ok(classify_inner(obj, x.clone(), gamma, budget, false))
}

/// All basic stationary points of a least-squares instance: for every
/// support J of size s the minimum-norm solution of the restricted
/// normal equations, plus any smaller support whose restricted solution
/// has a fully vanishing gradient. Points coinciding within 1e-10 are
/// merged (the same point surfaces under several supports when entries
/// come out exactly zero); output is sorted by objective value.
pub fn enumerate_stationary(
    q: &QuadraticInstance,
    budget: SparsityBudget,
    gamma: f64,
) -> Result<Vec<StationaryPoint>> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(IhtError::InvalidGamma(gamma));
    }
    let n = q.dim();
    if budget.n() != n {
        return Err(IhtError::DimensionMismatch {
            expected: n,
            got: budget.n(),
        });
    }
    const LIMIT: u128 = 1_000_000;
    let count = binomial(n, budget.s());
    if count > LIMIT {
        return Err(IhtError::EnumerationTooLarge {
            n,
            k: budget.s(),
            count,
            limit: LIMIT,
        });
    }

    let na = linalg::to_na(q.matrix());
    let rhs = DVector::from_column_slice(q.observations().as_slice());
    let eps_g = gradient_tolerance(q);

    let mut candidates: Vec<StationaryPoint> = Vec::new();
    for k in 0..=budget.s() {
        let supports: Vec<Vec<usize>> = combinations(n, k).collect();
        let found: Vec<Option<StationaryPoint>> = supports
            .par_iter()
            .map(|support| {
                let (entries, degenerate) = if k == 0 {
                    (vec![0.0; n], false)
                } else {
                    let sub = na.select_columns(support.iter());
                    let out = linalg::min_norm_lstsq(&sub, &rhs);
                    let mut x = vec![0.0; n];
                    for (pos, &j) in support.iter().enumerate() {
                        x[j] = out.solution[pos];
                    }
                    // Solver roundoff leaves 1e-16 junk where entries are
                    // structurally zero; snap it so supports stay exact.
                    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                    for v in x.iter_mut() {
                        if v.abs() <= 1e-12 * scale {
                            *v = 0.0;
                        }
                    }
                    (x, out.degenerate)
                };
                let x = DenseVector::new(entries).ok()?;
                if k < budget.s() {
                    // Undersized supports only qualify with the entire
                    // gradient at zero; otherwise a larger support
                    // strictly improves and this point is not basic.
                    if q.gradient(&x).max_abs() > eps_g {
                        return None;
                    }
                }
                Some(classify_inner(q, x, gamma, budget, degenerate))
            })
            .collect();
        candidates.extend(found.into_iter().flatten());
    }

    let mut unique: Vec<StationaryPoint> = Vec::new();
    for p in candidates {
        let same = unique.iter_mut().find(|u| {
            u.point
                .iter()
                .zip(p.point.iter())
                .all(|(a, b)| (a - b).abs() <= 1e-10)
        });
        match same {
            Some(u) => {
                if u.degenerate && !p.degenerate {
                    *u = p;
                }
            }
            None => unique.push(p),
        }
    }
    unique.sort_by(|a, b| {
        a.f_value
            .partial_cmp(&b.f_value)
            .expect("objective values are finite")
            .then_with(|| a.support.cmp(&b.support))
    });
    Ok(unique)
}

/// For each unstable point, the stable point witnessing a strictly
/// smaller objective value. Indices refer to positions in the input
/// slice. `counterexamples` lists unstable points with no witness.
#[derive(Clone, Debug, Serialize)]
pub struct OrderingReport {
    pub pairs: Vec<(usize, usize)>,
    pub counterexamples: Vec<usize>,
    pub holds: bool,
}

/// Checks that below every unstable point sits a stable one: for each
/// unstable point there must exist a stable point with strictly smaller
/// objective value.
pub fn check_corollary4(points: &[StationaryPoint]) -> OrderingReport {
    let stable: Vec<usize> = (0..points.len())
        .filter(|&i| {
            matches!(
                points[i].classification,
                Classification::StrictlyStable | Classification::StableBoundary
            )
        })
        .collect();
    let mut pairs = Vec::new();
    let mut counterexamples = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if p.classification != Classification::Unstable {
            continue;
        }
        let witness = stable
            .iter()
            .copied()
            .filter(|&j| points[j].f_value < p.f_value)
            .min_by(|&a, &b| {
                points[a]
                    .f_value
                    .partial_cmp(&points[b].f_value)
                    .expect("objective values are finite")
            });
        match witness {
            Some(j) => pairs.push((i, j)),
            None => counterexamples.push(i),
        }
    }
    OrderingReport {
        holds: counterexamples.is_empty(),
        pairs,
        counterexamples,
    }
}

/// Whether `p.point` belongs to the projection family of its own gradient
/// step: some optimal index set reproduces the point within 1e-8. True
/// exactly for the stable classifications.
pub fn check_fixed_point(
    obj: &dyn Objective,
    p: &StationaryPoint,
    gamma: f64,
    budget: SparsityBudget,
) -> Result<bool> {
    let grad = obj.gradient(&p.point);
    let ht = ht_gradient_map(&p.point, &grad, gamma, budget)?;
    let moved: Vec<f64> = p
        .point
        .iter()
        .zip(grad.iter())
        .map(|(xi, gi)| xi - gamma * gi)
        .collect();
    let moved = DenseVector::new(moved)?;
    Ok(ht
        .alternatives
        .iter()
        .any(|set| restrict(&moved, set).dist(&p.point) <= 1e-8))
}

fn fmt4(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    format!("{v:>9.4}")
}

/// Fixed-width table: No., x_1..x_n, g_1..g_n, HT-stability, values to 4
/// decimals.
pub fn stationary_table(points: &[StationaryPoint]) -> String {
    let n = points.first().map_or(0, |p| p.point.len());
    let mut out = String::from("No.");
    for i in 1..=n {
        out.push_str(&format!("{:>9}", format!("x_{i}")));
    }
    for i in 1..=n {
        out.push_str(&format!("{:>9}", format!("g_{i}")));
    }
    out.push_str("  HT-stability\n");
    for (no, p) in points.iter().enumerate() {
        out.push_str(&format!("{:>3}", no + 1));
        for v in p.point.iter() {
            out.push_str(&fmt4(*v));
        }
        for v in p.grad.iter() {
            out.push_str(&fmt4(*v));
        }
        out.push_str(&format!("  {}\n", p.classification));
    }
    out
}

#[derive(Serialize)]
struct PointRow {
    no: usize,
    x: Vec<f64>,
    support: Vec<usize>,
    grad: Vec<f64>,
    f_value: f64,
    classification: Classification,
    min_abs_on_top: f64,
    gamma_max_grad_off: f64,
    degenerate: bool,
}

#[derive(Serialize)]
struct StationaryFile {
    version: u32,
    gamma: f64,
    s: usize,
    points: Vec<PointRow>,
}

/// JSON rendering with 1-based supports and the full classification
/// evidence per point.
pub fn stationary_json_string(
    points: &[StationaryPoint],
    gamma: f64,
    budget: SparsityBudget,
) -> String {
    let rows = points
        .iter()
        .enumerate()
        .map(|(i, p)| PointRow {
            no: i + 1,
            x: p.point.as_slice().to_vec(),
            support: p.support.one_based(),
            grad: p.grad.as_slice().to_vec(),
            f_value: p.f_value,
            classification: p.classification,
            min_abs_on_top: p.min_abs_on_top,
            gamma_max_grad_off: p.gamma_max_grad_off,
            degenerate: p.degenerate,
        })
        .collect();
    let file = StationaryFile {
        version: 1,
        gamma,
        s: budget.s(),
        points: rows,
    };
    serde_json::to_string_pretty(&file).expect("report serializes")
}

/// Writes [`stationary_json_string`] to a file.
pub fn write_stationary_json(
    points: &[StationaryPoint],
    gamma: f64,
    budget: SparsityBudget,
    path: &Path,
) -> Result<()> {
    std::fs::write(path, stationary_json_string(points, gamma, budget))
        .map_err(|e| IhtError::io(path, e))
}

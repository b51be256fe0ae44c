//! Hard thresholding: Euclidean projection onto the set of vectors with
//! at most s nonzeros.
//!
//! The projection keeps the s entries of largest magnitude and zeroes the
//! rest. It is set-valued whenever the s-th and (s+1)-th magnitudes tie;
//! [`HTResult`] reports the full tie family alongside one canonical
//! selection so downstream consumers stay deterministic.

use crate::error::{IhtError, Result};
use crate::types::{binomial, combinations, top_s_split, DenseVector, SparsityBudget, SupportSet};

/// Cap on how many alternative index sets a single projection reports.
pub const MAX_REPORTED_ALTERNATIVES: usize = 1000;

/// Projection outcome. `projected` restricts the input to `chosen`, the
/// canonical index set (lexicographically smallest maximizer, so lower
/// indices win ties). `alternatives` lists every optimal index set in
/// lexicographic order, `chosen` included; it is cut off at
/// [`MAX_REPORTED_ALTERNATIVES`] with `truncated` set.
#[derive(Clone, Debug)]
pub struct HTResult {
    pub projected: DenseVector,
    pub chosen: SupportSet,
    pub alternatives: Vec<SupportSet>,
    pub tie_occurred: bool,
    pub truncated: bool,
}

/// Projects `x` onto the sparsity constraint of `budget`.
pub fn hard_threshold(x: &DenseVector, budget: SparsityBudget) -> Result<HTResult> {
    if budget.n() != x.len() {
        return Err(IhtError::DimensionMismatch {
            expected: budget.n(),
            got: x.len(),
        });
    }
    let split = top_s_split(x.as_slice(), budget.s());
    let chosen = SupportSet::from_sorted_unchecked(split.canonical);

    let count = binomial(split.tie.len(), split.slots);
    let tie_occurred = count > 1;
    let truncated = count > MAX_REPORTED_ALTERNATIVES as u128;
    let mut alternatives: Vec<SupportSet> = combinations(split.tie.len(), split.slots)
        .take(MAX_REPORTED_ALTERNATIVES)
        .map(|pick| {
            let mut set: Vec<usize> = split.must.clone();
            set.extend(pick.into_iter().map(|t| split.tie[t]));
            set.sort_unstable();
            SupportSet::from_sorted_unchecked(set)
        })
        .collect();
    alternatives.sort();

    let projected = restrict(x, &chosen);
    Ok(HTResult {
        projected,
        chosen,
        alternatives,
        tie_occurred,
        truncated,
    })
}

/// Copy of `x` zeroed outside `set`.
pub fn restrict(x: &DenseVector, set: &SupportSet) -> DenseVector {
    let entries: Vec<f64> = (0..x.len())
        .map(|i| if set.contains(i) { x[i] } else { 0.0 })
        .collect();
    DenseVector::new(entries).expect("restriction of a valid vector stays valid")
}

/// One projected gradient step: project x - gamma * g. The caller supplies
/// the gradient; this map never evaluates the objective.
pub fn ht_gradient_map(
    x: &DenseVector,
    gradient: &DenseVector,
    gamma: f64,
    budget: SparsityBudget,
) -> Result<HTResult> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(IhtError::InvalidGamma(gamma));
    }
    if gradient.len() != x.len() {
        return Err(IhtError::DimensionMismatch {
            expected: x.len(),
            got: gradient.len(),
        });
    }
    let moved: Vec<f64> = x
        .iter()
        .zip(gradient.iter())
        .map(|(xi, gi)| xi - gamma * gi)
        .collect();
    hard_threshold(&DenseVector::new(moved)?, budget)
}

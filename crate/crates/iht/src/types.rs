//! Numeric containers, index-set machinery, and deterministic ordering
//! primitives shared by every other module.
//!
//! All types here are immutable after construction and all operations are
//! pure functions, so unrestricted concurrent use is safe.

use serde::{Deserialize, Serialize};

use crate::error::{IhtError, Result};

/// Dense real vector. Length is fixed at construction and at least 1;
/// every entry is finite (NaN and infinity never survive construction).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DenseVector {
    entries: Vec<f64>,
}

impl From<DenseVector> for Vec<f64> {
    fn from(v: DenseVector) -> Vec<f64> {
        v.entries
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = IhtError;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        DenseVector::new(entries)
    }
}

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(IhtError::EmptyVector);
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(IhtError::NonFinite(i));
        }
        Ok(DenseVector { entries })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        DenseVector { entries: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.entries.iter()
    }

    /// Number of exactly nonzero entries. No tolerance: the count is
    /// combinatorial, and callers needing a thresholded view take one
    /// explicitly.
    pub fn l0_norm(&self) -> usize {
        self.entries.iter().filter(|v| **v != 0.0).count()
    }

    /// Index set of exactly nonzero entries, ascending.
    pub fn support(&self) -> SupportSet {
        SupportSet {
            indices: (0..self.len()).filter(|&i| self.entries[i] != 0.0).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Euclidean distance to another vector of the same length.
    pub fn dist(&self, other: &DenseVector) -> f64 {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// Dense real matrix, row-major. Entries are finite; the buffer length
/// equals rows * cols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>")]
#[serde(into = "Vec<Vec<f64>>")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for DenseMatrix {
    type Error = IhtError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        DenseMatrix::from_rows(rows)
    }
}

impl From<DenseMatrix> for Vec<Vec<f64>> {
    fn from(m: DenseMatrix) -> Vec<Vec<f64>> {
        (0..m.rows).map(|i| m.row(i).to_vec()).collect()
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(IhtError::BadMatrixShape {
                rows,
                cols,
                need: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(IhtError::NonFinite(i));
        }
        Ok(DenseMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(IhtError::BadMatrixShape {
                rows: m,
                cols: n,
                need: m * n,
                got: rows.iter().map(|r| r.len()).sum(),
            });
        }
        DenseMatrix::new(m, n, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        DenseMatrix { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        assert!(i < self.rows, "row out of range");
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// A x for a slice of length cols.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// A^T r for a slice of length rows.
    pub fn tr_matvec(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.rows, "dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, ri) in r.iter().enumerate() {
            for (j, out_j) in out.iter_mut().enumerate() {
                *out_j += self.get(i, j) * ri;
            }
        }
        out
    }
}

/// Strictly increasing set of coordinate indices, 0-based internally.
/// User-facing output converts to 1-based via [`SupportSet::one_based`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    /// Validates that `indices` is strictly increasing and fits inside
    /// dimension `n`.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(IhtError::UnorderedSupport(indices));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(IhtError::IndexOutOfRange { index: bad, n });
        }
        Ok(SupportSet { indices })
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        SupportSet { indices }
    }

    pub fn empty() -> Self {
        SupportSet { indices: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.indices.iter()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Sorted union with another set.
    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let mut merged: Vec<usize> = self.indices.iter().chain(other.indices.iter()).copied().collect();
        merged.sort_unstable();
        merged.dedup();
        SupportSet { indices: merged }
    }

    /// Indices in [0, n) not present in this set.
    pub fn complement(&self, n: usize) -> SupportSet {
        SupportSet {
            indices: (0..n).filter(|i| !self.contains(*i)).collect(),
        }
    }

    /// 1-based copy for tables, reports, and file output.
    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }
}

/// Sparsity level s for the constraint set { x : at most s nonzeros },
/// tied to the ambient dimension n. Requires 1 <= s < n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparsityBudget {
    s: usize,
    n: usize,
}

impl SparsityBudget {
    pub fn new(s: usize, n: usize) -> Result<Self> {
        if s == 0 || s >= n {
            return Err(IhtError::InvalidBudget { s, n });
        }
        Ok(SparsityBudget { s, n })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// C(n, k) with saturation at u128::MAX.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic k-subsets of 0..n. Lazy, so callers can cap enumeration
/// without materializing the full family.
pub(crate) struct Combinations {
    n: usize,
    k: usize,
    current: Option<Vec<usize>>,
}

pub(crate) fn combinations(n: usize, k: usize) -> Combinations {
    let current = if k <= n { Some((0..k).collect()) } else { None };
    Combinations { n, k, current }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.current.as_mut()?;
        let out = current.clone();
        // Advance to the lexicographic successor.
        let mut i = self.k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if current[i] < self.n - self.k + i {
                current[i] += 1;
                for j in i + 1..self.k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Outcome of splitting a vector's coordinates around the s-th largest
/// magnitude: `canonical` is the tie-rule selection, `must` the indices
/// strictly above the threshold, `tie` the indices exactly at it, and
/// `slots` how many tie members a top-s set takes.
pub(crate) struct TopSplit {
    pub canonical: Vec<usize>,
    pub must: Vec<usize>,
    pub tie: Vec<usize>,
    pub slots: usize,
}

/// Magnitudes compare via abs(), which also sends -0.0 to +0.0 so signed
/// zeros cannot produce platform-dependent tie artifacts.
pub(crate) fn top_s_split(entries: &[f64], s: usize) -> TopSplit {
    let n = entries.len();
    debug_assert!(s < n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        entries[b]
            .abs()
            .partial_cmp(&entries[a].abs())
            .expect("entries are finite")
            .then(a.cmp(&b))
    });
    let mut canonical: Vec<usize> = order[..s].to_vec();
    canonical.sort_unstable();
    let threshold = entries[order[s - 1]].abs();
    let must: Vec<usize> = (0..n).filter(|&i| entries[i].abs() > threshold).collect();
    let tie: Vec<usize> = (0..n).filter(|&i| entries[i].abs() == threshold).collect();
    TopSplit {
        slots: s - must.len(),
        canonical,
        must,
        tie,
    }
}

/// Every index set of cardinality s achieving the maximal sum of entry
/// magnitudes, lexicographically sorted; the first element is the
/// canonical set under the tie rule (prefer lower indices).
///
/// Errors only when a massive magnitude tie would make the family larger
/// than 10^6 sets.
pub fn top_s_index_sets(x: &DenseVector, budget: SparsityBudget) -> Result<Vec<SupportSet>> {
    if budget.n() != x.len() {
        return Err(IhtError::DimensionMismatch {
            expected: budget.n(),
            got: x.len(),
        });
    }
    let split = top_s_split(x.as_slice(), budget.s());
    const LIMIT: u128 = 1_000_000;
    let count = binomial(split.tie.len(), split.slots);
    if count > LIMIT {
        return Err(IhtError::EnumerationTooLarge {
            n: split.tie.len(),
            k: split.slots,
            count,
            limit: LIMIT,
        });
    }
    let mut family: Vec<SupportSet> = combinations(split.tie.len(), split.slots)
        .map(|pick| {
            let mut set: Vec<usize> = split.must.clone();
            set.extend(pick.into_iter().map(|t| split.tie[t]));
            set.sort_unstable();
            SupportSet::from_sorted_unchecked(set)
        })
        .collect();
    family.sort();
    debug_assert_eq!(family[0].as_slice(), split.canonical.as_slice());
    Ok(family)
}

#[cfg(test)]
mod tests {
    use itertools::Itertools;
    use proptest::prelude::*;

    use super::*;

    fn dv(v: &[f64]) -> DenseVector {
        DenseVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn l0_counts_exact_nonzeros() {
        assert_eq!(dv(&[0.0, -3.0, 1.0]).l0_norm(), 2);
        assert_eq!(DenseVector::zeros(5).l0_norm(), 0);
        assert_eq!(dv(&[1.3474, 1.0331, 0.0, 0.0]).l0_norm(), 2);
        // No tolerance: tiny values still count.
        assert_eq!(dv(&[1e-300, 0.0]).l0_norm(), 1);
    }

    #[test]
    fn support_restriction_preserves_l0() {
        let x = dv(&[0.5, 0.0, -2.0, 0.0, 1.0]);
        let supp = x.support();
        assert_eq!(supp.as_slice(), &[0, 2, 4]);
        assert_eq!(supp.len(), x.l0_norm());
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(DenseVector::new(vec![]), Err(IhtError::EmptyVector)));
        assert!(matches!(
            DenseVector::new(vec![1.0, f64::NAN]),
            Err(IhtError::NonFinite(1))
        ));
        assert!(matches!(
            DenseMatrix::new(2, 2, vec![1.0; 3]),
            Err(IhtError::BadMatrixShape { .. })
        ));
        assert!(matches!(
            SupportSet::new(vec![2, 1], 4),
            Err(IhtError::UnorderedSupport(_))
        ));
        assert!(matches!(
            SupportSet::new(vec![0, 4], 4),
            Err(IhtError::IndexOutOfRange { index: 4, n: 4 })
        ));
        assert!(SparsityBudget::new(0, 4).is_err());
        assert!(SparsityBudget::new(4, 4).is_err());
        assert!(SparsityBudget::new(1, 2).is_ok());
    }

    #[test]
    fn tie_family_for_the_classic_example() {
        // |x| = [1, 3, 1]: index 1 is forced, indices 0 and 2 tie for the
        // remaining slot. Canonical set prefers the lower index.
        let sets = top_s_index_sets(&dv(&[1.0, -3.0, 1.0]), SparsityBudget::new(2, 3).unwrap()).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].as_slice(), &[0, 1]);
        assert_eq!(sets[1].as_slice(), &[1, 2]);
    }

    #[test]
    fn unique_magnitudes_give_a_single_set() {
        let sets = top_s_index_sets(&dv(&[5.0, 0.0, 0.0, 1.0]), SparsityBudget::new(2, 4).unwrap()).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].as_slice(), &[0, 3]);
    }

    #[test]
    fn all_equal_magnitudes_enumerate_every_subset() {
        let sets = top_s_index_sets(&dv(&[2.0, 2.0, 2.0]), SparsityBudget::new(2, 3).unwrap()).unwrap();
        assert_eq!(sets.len(), 3);
        assert_eq!(sets[0].as_slice(), &[0, 1]);
    }

    #[test]
    fn signed_zeros_tie_with_plain_zeros() {
        let sets = top_s_index_sets(&dv(&[-0.0, 0.0, 1.0]), SparsityBudget::new(2, 3).unwrap()).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].as_slice(), &[0, 2]);
        assert_eq!(sets[1].as_slice(), &[1, 2]);
    }

    #[test]
    fn oversized_tie_family_is_refused() {
        let x = DenseVector::new(vec![1.0; 40]).unwrap();
        let err = top_s_index_sets(&x, SparsityBudget::new(18, 40).unwrap()).unwrap_err();
        assert!(matches!(err, IhtError::EnumerationTooLarge { .. }));
    }

    #[test]
    fn combinations_are_lexicographic_and_complete() {
        let all: Vec<Vec<usize>> = combinations(5, 3).collect();
        assert_eq!(all.len() as u128, binomial(5, 3));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all.last().unwrap(), &vec![2, 3, 4]);
        assert_eq!(combinations(4, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
    }

    proptest! {
        // Oracle: the returned family equals the brute-force argmax family
        // over all C(n, s) subsets, enumerated independently via itertools.
        #[test]
        fn family_matches_brute_force(
            entries in prop::collection::vec(-4..=4i32, 2..9),
            s_raw in 1usize..8,
        ) {
            let n = entries.len();
            let s = 1 + s_raw % (n.max(2) - 1);
            prop_assume!(s < n);
            let x = DenseVector::new(entries.iter().map(|v| *v as f64 / 2.0).collect()).unwrap();
            let family = top_s_index_sets(&x, SparsityBudget::new(s, n).unwrap()).unwrap();

            let score = |set: &[usize]| -> f64 { set.iter().map(|&i| x[i].abs()).sum() };
            let best = (0..n)
                .combinations(s)
                .map(|c| score(&c))
                .fold(f64::NEG_INFINITY, f64::max);
            let brute: Vec<Vec<usize>> = (0..n)
                .combinations(s)
                .filter(|c| score(c) == best)
                .collect();
            let got: Vec<Vec<usize>> = family.iter().map(|s| s.as_slice().to_vec()).collect();
            prop_assert_eq!(got, brute);
        }

        // Every returned set dominates the complement in magnitude.
        #[test]
        fn min_inside_dominates_max_outside(
            entries in prop::collection::vec(-10.0f64..10.0, 3..10),
            s_raw in 1usize..9,
        ) {
            let n = entries.len();
            let s = 1 + s_raw % (n - 1);
            let x = DenseVector::new(entries).unwrap();
            for set in top_s_index_sets(&x, SparsityBudget::new(s, n).unwrap()).unwrap() {
                let inside = set.iter().map(|&i| x[i].abs()).fold(f64::INFINITY, f64::min);
                let outside = (0..n)
                    .filter(|i| !set.contains(*i))
                    .map(|i| x[i].abs())
                    .fold(0.0f64, f64::max);
                prop_assert!(inside >= outside);
            }
        }
    }
}

//! Internal dense linear algebra: symmetric eigenvalue extremes and
//! minimum-norm least-squares solves. Everything here delegates the
//! numerics to nalgebra; this module only fixes conventions (tolerances,
//! fallbacks, degeneracy flags) the rest of the crate relies on.

use nalgebra::{DMatrix, DVector};

use crate::error::{IhtError, Result};
use crate::types::DenseMatrix;

/// Dimension above which the dense symmetric eigendecomposition is
/// replaced by power iteration for the single extreme eigenvalue.
const DENSE_EIGEN_LIMIT: usize = 64;

pub(crate) fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

/// Largest eigenvalue of the positive semidefinite matrix A^T A.
pub(crate) fn gram_max_eigenvalue(a: &DenseMatrix) -> Result<f64> {
    let na = to_na(a);
    let gram = na.transpose() * &na;
    if gram.nrows() <= DENSE_EIGEN_LIMIT {
        Ok(symmetric_eigen_extremes(&gram).1)
    } else {
        power_iteration_max(&gram)
    }
}

/// (min, max) eigenvalues of a symmetric matrix. Caller guarantees
/// symmetry; the decomposition only reads one triangle.
pub(crate) fn symmetric_eigen_extremes(sym: &DMatrix<f64>) -> (f64, f64) {
    let eigen = sym.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in eigen.eigenvalues.iter() {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    (lo, hi)
}

/// Power iteration for the dominant eigenvalue of a PSD matrix, started
/// from the normalized all-ones vector. Relative tolerance 1e-10 on the
/// Rayleigh quotient, hard cap of 100000 sweeps.
fn power_iteration_max(gram: &DMatrix<f64>) -> Result<f64> {
    let n = gram.nrows();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0f64;
    const MAX_SWEEPS: usize = 100_000;
    for sweep in 0..MAX_SWEEPS {
        let w = gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            // The start vector is in the kernel of a PSD matrix only if
            // the matrix is zero on its span; restarting against e_1
            // covers the remaining degenerate case cheaply.
            if sweep == 0 {
                v = DVector::zeros(n);
                v[0] = 1.0;
                continue;
            }
            return Ok(0.0);
        }
        let next = v.dot(&w);
        v = w / norm;
        if (next - lambda).abs() <= 1e-10 * next.abs().max(1.0) {
            return Ok(next);
        }
        lambda = next;
    }
    Err(IhtError::PowerIterationDiverged(MAX_SWEEPS))
}

/// Minimum-norm least-squares solution of B x = rhs via SVD, plus a
/// degeneracy flag. Singular values below max_sv * 1e-13 are treated as
/// zero; `degenerate` is set when the squared spectral condition number
/// of B (the condition number of B^T B) exceeds 1e12.
pub(crate) struct LstsqOutcome {
    pub solution: Vec<f64>,
    pub degenerate: bool,
}

pub(crate) fn min_norm_lstsq(b: &DMatrix<f64>, rhs: &DVector<f64>) -> LstsqOutcome {
    let svd = b.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let min_sv = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let cutoff = max_sv * 1e-13;
    let solution = svd
        .solve(rhs, cutoff)
        .expect("svd computed with both factors");
    let degenerate =
        max_sv == 0.0 || min_sv <= cutoff || (max_sv / min_sv).powi(2) > 1e12;
    LstsqOutcome {
        solution: solution.iter().copied().collect(),
        degenerate,
    }
}

//! Objective functions and their restricted smoothness/convexity
//! constants.
//!
//! The central instance is mean-squared-error linear regression,
//! f(x) = (1/m) * ||A x - y||^2, whose gradient is (2/m) A^T (A x - y).
//! A generic [`Objective`] trait keeps the iteration and certificate
//! machinery usable with custom smooth functions.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::error::{IhtError, Result};
use crate::linalg;
use crate::types::{combinations, DenseMatrix, DenseVector, SparsityBudget, SupportSet};

/// Smooth objective on R^n. Implementations must be deterministic and
/// thread-safe; `value` and `gradient` panic on dimension mismatch since
/// that is always a caller bug, not a data condition.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &DenseVector) -> f64;

    fn gradient(&self, x: &DenseVector) -> DenseVector;

    /// Scale for gradient-based stationarity thresholds. Tolerances
    /// multiply this so classification behaves identically across
    /// rescaled copies of the same problem. Default 1.0 means absolute
    /// tolerances.
    fn stationarity_scale(&self) -> f64 {
        1.0
    }
}

/// Objective built from closures, for quick experiments and for driving
/// the iteration with functions that have no matrix structure.
pub struct FnObjective {
    dim: usize,
    value: Box<dyn Fn(&DenseVector) -> f64 + Sync>,
    gradient: Box<dyn Fn(&DenseVector) -> DenseVector + Sync>,
}

impl FnObjective {
    pub fn new(
        dim: usize,
        value: impl Fn(&DenseVector) -> f64 + Sync + 'static,
        gradient: impl Fn(&DenseVector) -> DenseVector + Sync + 'static,
    ) -> Self {
        assert!(dim > 0, "dimension must be positive");
        FnObjective {
            dim,
            value: Box::new(value),
            gradient: Box::new(gradient),
        }
    }
}

impl Objective for FnObjective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &DenseVector) -> f64 {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        (self.value)(x)
    }

    fn gradient(&self, x: &DenseVector) -> DenseVector {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        let g = (self.gradient)(x);
        assert_eq!(g.len(), self.dim, "gradient dimension mismatch");
        g
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(rename = "A")]
    a: DenseMatrix,
    y: DenseVector,
}

/// Least-squares instance f(x) = (1/m) ||A x - y||^2 for an m-by-n design
/// matrix A and m observations y.
pub struct QuadraticInstance {
    a: DenseMatrix,
    y: DenseVector,
    /// max(1, ||A^T y||_inf), cached: the natural size of the gradient
    /// near the origin, used to scale stationarity tolerances.
    scale: f64,
}

impl QuadraticInstance {
    pub fn new(a: DenseMatrix, y: DenseVector) -> Result<Self> {
        if y.len() != a.rows() {
            return Err(IhtError::DimensionMismatch {
                expected: a.rows(),
                got: y.len(),
            });
        }
        let aty = a.tr_matvec(y.as_slice());
        let scale = aty.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        Ok(QuadraticInstance { a, y, scale })
    }

    /// The 4x4 regression instance used across the examples and tests:
    /// a fixed Gaussian-style design with one dominant sparse fit.
    pub fn paper4x4() -> Self {
        let raw = include_str!("../fixtures/paper4x4.json");
        Self::from_json_str(raw).expect("built-in instance parses")
    }

    pub fn from_json_str(raw: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(raw).map_err(|e| IhtError::Parse {
            path: "<inline json>".into(),
            detail: e.to_string(),
        })?;
        QuadraticInstance::new(file.a, file.y)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let mut raw = String::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_string(&mut raw))
            .map_err(|e| IhtError::io(path, e))?;
        let file: InstanceFile = serde_json::from_str(&raw).map_err(|e| IhtError::Parse {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        QuadraticInstance::new(file.a, file.y)
    }

    /// Loads A from a CSV of comma-separated rows and y from a file with
    /// one number per line (a single comma-separated line also works).
    pub fn from_csv_files(a_path: &Path, y_path: &Path) -> Result<Self> {
        let a_raw = std::fs::read_to_string(a_path).map_err(|e| IhtError::io(a_path, e))?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in a_raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|t| t.trim().parse::<f64>()).collect();
            rows.push(row.map_err(|e| IhtError::Parse {
                path: a_path.to_path_buf(),
                detail: format!("line {}: {}", lineno + 1, e),
            })?);
        }
        let a = DenseMatrix::from_rows(rows)?;

        let y_raw = std::fs::read_to_string(y_path).map_err(|e| IhtError::io(y_path, e))?;
        let mut ys: Vec<f64> = Vec::new();
        for (lineno, line) in y_raw.lines().enumerate() {
            for tok in line.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                ys.push(tok.parse::<f64>().map_err(|e| IhtError::Parse {
                    path: y_path.to_path_buf(),
                    detail: format!("line {}: {}", lineno + 1, e),
                })?);
            }
        }
        QuadraticInstance::new(a, DenseVector::new(ys)?)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn observations(&self) -> &DenseVector {
        &self.y
    }

    pub fn num_samples(&self) -> usize {
        self.a.rows()
    }

    fn residual(&self, x: &DenseVector) -> Vec<f64> {
        let ax = self.a.matvec(x.as_slice());
        ax.iter().zip(self.y.iter()).map(|(a, b)| a - b).collect()
    }
}

impl Objective for QuadraticInstance {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &DenseVector) -> f64 {
        assert_eq!(x.len(), self.dim(), "dimension mismatch");
        let r = self.residual(x);
        r.iter().map(|v| v * v).sum::<f64>() / self.a.rows() as f64
    }

    fn gradient(&self, x: &DenseVector) -> DenseVector {
        assert_eq!(x.len(), self.dim(), "dimension mismatch");
        let r = self.residual(x);
        let mut g = self.a.tr_matvec(&r);
        let c = 2.0 / self.a.rows() as f64;
        for v in g.iter_mut() {
            *v *= c;
        }
        DenseVector::new(g).expect("gradient of finite data is finite")
    }

    fn stationarity_scale(&self) -> f64 {
        self.scale
    }
}

/// Smoothness and strong-convexity constants restricted to sparse
/// directions.
#[derive(Clone, Debug)]
pub struct RestrictedConstants {
    /// Smoothness bound used by step-size rules: (2/m) times the largest
    /// eigenvalue of A^T A. Valid over all directions, hence over every
    /// sparse one.
    pub l_s: f64,
    /// Smoothness over (2s)-sparse directions only: max over supports T
    /// of size s_effective of (2/m) lambda_max(A_T^T A_T). None when the
    /// support family is too large to enumerate.
    pub l_s_restricted: Option<f64>,
    /// Strong convexity over (2s)-sparse directions: min over the same
    /// supports of (2/m) lambda_min(A_T^T A_T). None when not enumerable.
    pub beta_s: Option<f64>,
    /// The support size min(2s, n) the restricted scans used.
    pub s_effective: usize,
}

/// Computes the restricted constants of a least-squares instance for
/// budget s. The restricted scans enumerate all supports of size
/// min(2s, n) and are skipped (None) when n exceeds 12.
pub fn rss_constant(inst: &QuadraticInstance, budget: SparsityBudget) -> Result<RestrictedConstants> {
    let n = inst.dim();
    if budget.n() != n {
        return Err(IhtError::DimensionMismatch {
            expected: n,
            got: budget.n(),
        });
    }
    let m = inst.num_samples() as f64;
    let l_s = 2.0 / m * linalg::gram_max_eigenvalue(inst.matrix())?;

    let s_effective = (2 * budget.s()).min(n);
    const EXHAUSTIVE_DIM_LIMIT: usize = 12;
    if n > EXHAUSTIVE_DIM_LIMIT {
        return Ok(RestrictedConstants {
            l_s,
            l_s_restricted: None,
            beta_s: None,
            s_effective,
        });
    }

    let na = linalg::to_na(inst.matrix());
    let mut beta = f64::INFINITY;
    let mut l_restricted = f64::NEG_INFINITY;
    for support in combinations(n, s_effective) {
        let sub = na.select_columns(support.iter());
        let gram = sub.transpose() * &sub;
        let (lo, hi) = linalg::symmetric_eigen_extremes(&gram);
        beta = beta.min(2.0 / m * lo);
        l_restricted = l_restricted.max(2.0 / m * hi);
    }
    Ok(RestrictedConstants {
        l_s,
        l_s_restricted: Some(l_restricted),
        beta_s: Some(beta),
        s_effective,
    })
}

/// Gradient of `obj` at `x` zeroed outside `set`: the object whose norm
/// measures stationarity relative to a support.
pub fn restricted_gradient(obj: &dyn Objective, x: &DenseVector, set: &SupportSet) -> DenseVector {
    crate::ht::restrict(&obj.gradient(x), set)
}

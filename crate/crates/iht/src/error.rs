//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

/// Everything that can go wrong across construction, iteration, analysis,
/// and file I/O. Variants are grouped by the exit-code class the CLI maps
/// them to: invalid input (2), numerical or certificate failure (3), I/O (4).
#[derive(Debug, Error)]
pub enum IhtError {
    /// A numeric container was handed an empty entry list.
    #[error("vector must have at least one entry")]
    EmptyVector,

    /// NaN or infinity rejected at construction.
    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    /// Lengths or dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Row-major entry buffer does not match the declared shape.
    #[error("matrix shape {rows}x{cols} needs {need} entries, got {got}")]
    BadMatrixShape {
        rows: usize,
        cols: usize,
        need: usize,
        got: usize,
    },

    /// Support index outside the ambient dimension.
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    /// Support indices must be strictly increasing.
    #[error("support indices must be strictly increasing, got {0:?}")]
    UnorderedSupport(Vec<usize>),

    /// Sparsity budget outside 1 <= s < n.
    #[error("sparsity budget must satisfy 1 <= s < n, got s={s}, n={n}")]
    InvalidBudget { s: usize, n: usize },

    /// Stepsize must be positive and finite.
    #[error("stepsize gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),

    /// Stepsize exceeds the certified descent regime.
    #[error("gamma {gamma} exceeds the certified bound 1/L_s = {bound}")]
    GammaAboveBound { gamma: f64, bound: f64 },

    /// Initial point violates the sparsity constraint.
    #[error("initial point has {got} nonzeros, budget allows {budget}")]
    InfeasibleStart { got: usize, budget: usize },

    /// Invalid run or experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A per-step descent guarantee failed while the stepsize was inside
    /// the certified regime; signals a gradient bug or an L_s underestimate.
    #[error("descent certificate {which} violated at step {step}: slack = {slack:.3e}")]
    CertificateViolation {
        step: usize,
        which: &'static str,
        slack: f64,
    },

    /// Objective value left the finite range during iteration.
    #[error("objective became non-finite at step {0}")]
    NonFiniteObjective(usize),

    /// Power iteration failed to reach the requested tolerance.
    #[error("power iteration did not converge within {0} iterations")]
    PowerIterationDiverged(usize),

    /// Exhaustive enumeration refused: too many index sets.
    #[error("support enumeration too large: C({n},{k}) = {count} exceeds limit {limit}")]
    EnumerationTooLarge {
        n: usize,
        k: usize,
        count: u128,
        limit: u128,
    },

    /// Escape experiments need at least one stable and one unstable point.
    #[error("escape experiment needs at least one stable and one unstable stationary point")]
    MissingStationaryPoints,

    /// Refusal to clobber an existing output file.
    #[error("refusing to overwrite existing file {} (pass --overwrite)", .0.display())]
    WouldOverwrite(PathBuf),

    /// Underlying I/O failure, annotated with the path involved.
    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed instance, config, or data file.
    #[error("parse error in {}: {detail}", .path.display())]
    Parse { path: PathBuf, detail: String },
}

pub type Result<T> = std::result::Result<T, IhtError>;

impl IhtError {
    /// Wrap an `io::Error` with the path it occurred on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IhtError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code class: 2 invalid input, 3 numerical/certificate
    /// failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        use IhtError::*;
        match self {
            EmptyVector | NonFinite(_) | DimensionMismatch { .. } | BadMatrixShape { .. }
            | IndexOutOfRange { .. } | UnorderedSupport(_) | InvalidBudget { .. }
            | InvalidGamma(_) | InfeasibleStart { .. } | Config(_)
            | MissingStationaryPoints => 2,
            GammaAboveBound { .. } | CertificateViolation { .. } | NonFiniteObjective(_)
            | PowerIterationDiverged(_) | EnumerationTooLarge { .. } => 3,
            WouldOverwrite(_) | Io { .. } | Parse { .. } => 4,
        }
    }
}

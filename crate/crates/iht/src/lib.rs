//! Sparsity-constrained least squares by iterative hard thresholding.
//!
//! The iteration is `x_{k+1} = H_s(x_k - gamma * grad f(x_k))`, where
//! `H_s` keeps the `s` largest-magnitude entries. For stepsizes up to
//! `1/L_s` every step comes with a machine-checkable descent certificate,
//! stationary points of small instances can be enumerated and classified
//! exhaustively, and a seeded perturbation experiment measures how
//! reliably the iteration leaves unstable points.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! - **`constants`** - smoothness constant `L_s`, the certified stepsize
//!   bound `1/L_s`, and the restricted curvature constant `beta_s`
//! - **`hard_thresholding`** - the projection `H_s`, including what is
//!   reported when magnitude ties make it set-valued
//! - **`stationary_table`** - exhaustive enumeration and stability
//!   classification of all stationary points, and how classifications
//!   change with the stepsize
//! - **`descent_run`** - a full run with per-step descent certificates
//!   and trajectory export
//! - **`escape_experiment`** - seeded, thread-count-independent Monte
//!   Carlo runs perturbing the unstable points
//! - **`local_rate`** - q-linear contraction factor estimation near a
//!   stable point
//!
//! ```bash
//! cargo run --example constants
//! cargo run --example hard_thresholding
//! cargo run --example stationary_table
//! cargo run --example descent_run
//! cargo run --example escape_experiment
//! cargo run --example local_rate
//! ```
//!
//! The same functionality ships as a binary with subcommands
//! `constants`, `stationary`, `run`, `escape`, and `check`; see
//! `cargo run -- --help`.
//!
//! ## Quick start
//!
//! ```
//! use iht::engine::{run_iht, IHTConfig, Termination};
//! use iht::objective::{rss_constant, QuadraticInstance};
//! use iht::types::{DenseVector, SparsityBudget};
//!
//! let inst = QuadraticInstance::paper4x4();
//! let budget = SparsityBudget::new(2, 4)?;
//! let constants = rss_constant(&inst, budget)?;
//!
//! let cfg = IHTConfig::new(1.0 / constants.l_s);
//! let traj = run_iht(&inst, &DenseVector::zeros(4), &cfg, budget, &constants)?;
//!
//! assert_eq!(traj.termination, Termination::Converged);
//! // Every step certifies its own descent; slacks are RHS - LHS >= 0
//! // up to roundoff.
//! assert!(traj.certificates.iter().all(|c| c.eq7_slack >= -1e-10));
//! # Ok::<(), iht::error::IhtError>(())
//! ```

pub mod error;
pub mod types;
pub mod ht;
mod linalg;
pub mod objective;
pub mod engine;
pub mod stationary;
pub mod escape;
pub mod cli;

pub use engine::{run_iht, IHTConfig, StepCertificate, Termination, Trajectory};
pub use error::{IhtError, Result};
pub use ht::{hard_threshold, ht_gradient_map, HTResult};
pub use objective::{rss_constant, Objective, QuadraticInstance, RestrictedConstants};
pub use stationary::{classify, enumerate_stationary, Classification, StationaryPoint};
pub use types::{DenseMatrix, DenseVector, SparsityBudget, SupportSet};

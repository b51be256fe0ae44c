// Near a strictly stable point the support freezes and the iteration
// becomes plain gradient descent on that support, so the distance to the
// limit shrinks q-linearly. This estimates the contraction factor from
// consecutive recorded iterates.

use iht::engine::{qlinear_rate, run_iht, IHTConfig};
use iht::objective::{rss_constant, QuadraticInstance};
use iht::stationary::enumerate_stationary;
use iht::types::{DenseVector, SparsityBudget};

fn main() {
    let inst = QuadraticInstance::paper4x4();
    let budget = SparsityBudget::new(2, 4).unwrap();
    let constants = rss_constant(&inst, budget).unwrap();

    let gamma = 0.06;
    let points = enumerate_stationary(&inst, budget, gamma).unwrap();
    let target = &points[0];
    println!(
        "target: lowest-f stable point, f = {:.6}, support {:?}",
        target.f_value,
        target.support.one_based()
    );

    let mut cfg = IHTConfig::new(gamma);
    cfg.max_iters = 600;
    cfg.conv_tol = 0.0; // run the full horizon
    let x0 = DenseVector::zeros(4);
    let traj = run_iht(&inst, &x0, &cfg, budget, &constants).unwrap();

    let ratios = qlinear_rate(&traj, &target.point);
    println!("recorded distance ratios: {}", ratios.len());
    for (i, r) in ratios.iter().enumerate().rev().take(5).rev() {
        println!("  step {:>3}: d_k+1/d_k = {r:.6}", i + 1);
    }

    let tail = &ratios[ratios.len().saturating_sub(20)..];
    let max_tail = tail.iter().cloned().fold(0.0f64, f64::max);
    println!("max ratio over the last 20 recorded steps: {max_tail:.6}");
    println!("all below 1, so the approach is q-linear at rate ~{max_tail:.3}");
}

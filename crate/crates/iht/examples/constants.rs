// Smoothness and curvature constants of a sparse least-squares instance:
// L_s bounds the gradient Lipschitz constant over 2s-sparse directions and
// 1/L_s is the largest certified stepsize.

use iht::objective::{rss_constant, Objective, QuadraticInstance};
use iht::types::{DenseMatrix, DenseVector, SparsityBudget};

fn report(name: &str, inst: &QuadraticInstance, s: usize) {
    let budget = SparsityBudget::new(s, inst.dim()).unwrap();
    let c = rss_constant(inst, budget).unwrap();
    println!("{name} (m={}, n={}, s={s})", inst.num_samples(), inst.dim());
    println!("  L_s        = {:.6}", c.l_s);
    println!("  1/L_s      = {:.6}", 1.0 / c.l_s);
    match c.l_s_restricted {
        Some(v) => println!("  L_s over {}-sparse supports = {:.6}", c.s_effective, v),
        None => println!("  restricted scan skipped (n too large for exhaustive supports)"),
    }
    match c.beta_s {
        Some(v) => println!("  beta_s     = {:.6}", v),
        None => println!("  beta_s not computed"),
    }
    println!();
}

fn main() {
    report("built-in 4x4 instance", &QuadraticInstance::paper4x4(), 2);

    // Orthogonal columns make every restricted constant coincide.
    let eye = DenseMatrix::identity(4);
    let y = DenseVector::new(vec![3.0, 2.0, 1.0, 0.5]).unwrap();
    let inst = QuadraticInstance::new(eye, y).unwrap();
    report("identity design", &inst, 2);
}

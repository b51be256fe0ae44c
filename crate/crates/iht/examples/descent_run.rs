// Runs the iteration from zero and checks the per-step descent
// certificates. Each step carries three slack values (stored as
// RHS - LHS, so nonnegative means the inequality held):
//
//   eq5_slack: actual decrease vs. the union-gradient lower bound
//   eq6_slack: gradient bound vs. the squared-move lower bound
//   eq7_slack: actual decrease vs. the own-support gradient bound
//
// The first two degenerate to 0 >= 0 at gamma = 1/L_s; the third stays
// strictly informative there.

use iht::engine::{run_iht, trajectory_csv_string, IHTConfig, Termination};
use iht::objective::{rss_constant, Objective, QuadraticInstance};
use iht::types::{DenseVector, SparsityBudget};

fn main() {
    let inst = QuadraticInstance::paper4x4();
    let budget = SparsityBudget::new(2, 4).unwrap();
    let constants = rss_constant(&inst, budget).unwrap();

    let gamma = 1.0 / constants.l_s;
    let cfg = IHTConfig::new(gamma);
    let x0 = DenseVector::zeros(4);
    let traj = run_iht(&inst, &x0, &cfg, budget, &constants).unwrap();

    println!("gamma = 1/L_s = {gamma:.6}");
    println!("f(x0) = {:.6}", traj.f_values[0]);
    println!(
        "terminated: {:?} after {} steps, f = {:.6}",
        traj.termination,
        traj.steps_taken,
        inst.value(&traj.final_point)
    );
    println!("final x = {:?}", traj.final_point.as_slice());
    assert_eq!(traj.termination, Termination::Converged);

    let mut worst = ("", f64::INFINITY);
    for cert in &traj.certificates {
        let (name, slack) = cert.worst_slack();
        if slack < worst.1 {
            worst = (name, slack);
        }
    }
    println!("worst slack over the run: {} = {:.3e}", worst.0, worst.1);

    let drops = traj
        .f_values
        .windows(2)
        .filter(|w| w[1] < w[0])
        .count();
    println!("strict decreases: {drops} of {} steps", traj.certificates.len());

    // The same data as a CSV, the format the command-line tool exports.
    let csv = trajectory_csv_string(&traj);
    println!("\nfirst trajectory rows:");
    for line in csv.lines().take(4) {
        println!("  {line}");
    }
}

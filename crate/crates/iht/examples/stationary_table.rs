// Enumerates every stationary point of the built-in 4x4 instance at s=2
// and classifies each as strictly HT-stable, boundary, or HT-unstable.
// Stability depends on the stepsize: larger gamma makes the escape
// condition easier to trigger, so stable points can flip to unstable.

use iht::objective::{rss_constant, QuadraticInstance};
use iht::stationary::{check_corollary4, enumerate_stationary, stationary_table, Classification};
use iht::types::SparsityBudget;

fn main() {
    let inst = QuadraticInstance::paper4x4();
    let budget = SparsityBudget::new(2, 4).unwrap();
    let c = rss_constant(&inst, budget).unwrap();

    let gamma = 0.06;
    let points = enumerate_stationary(&inst, budget, gamma).unwrap();
    println!("gamma = {gamma}");
    print!("{}", stationary_table(&points));
    println!();

    for p in &points {
        println!(
            "f = {:.6}  support {:?}  min|x| on top = {:.4}  gamma*max off-support |g| = {:.6}",
            p.f_value,
            p.support.one_based(),
            p.min_abs_on_top,
            p.gamma_max_grad_off,
        );
    }
    println!();

    // Every unstable point sits strictly above some stable point in f, so
    // escaping an unstable point can only improve the objective.
    let ordering = check_corollary4(&points);
    println!(
        "unstable-above-stable ordering holds: {} ({} pairs checked)",
        ordering.holds,
        ordering.pairs.len()
    );
    println!();

    // At the certified stepsize limit the second point loses its margin.
    let gamma_max = 1.0 / c.l_s;
    let at_limit = enumerate_stationary(&inst, budget, gamma_max).unwrap();
    let flips = points
        .iter()
        .zip(&at_limit)
        .filter(|(a, b)| a.classification != b.classification)
        .count();
    println!("at gamma = 1/L_s = {gamma_max:.4}: {flips} classification(s) change");
    for p in &at_limit {
        if p.classification != Classification::NotStationary {
            println!("  f = {:.6}  {}", p.f_value, p.classification);
        }
    }
}

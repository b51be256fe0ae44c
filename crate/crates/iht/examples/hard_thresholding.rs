// Hard thresholding keeps the s largest-magnitude entries. On magnitude
// ties the projection is set-valued; this walks through what the library
// reports in that case.

use iht::ht::{hard_threshold, ht_gradient_map};
use iht::types::{DenseVector, SparsityBudget};

fn show(label: &str, x: &[f64], s: usize) {
    let v = DenseVector::new(x.to_vec()).unwrap();
    let budget = SparsityBudget::new(s, x.len()).unwrap();
    let r = hard_threshold(&v, budget).unwrap();
    println!("{label}: H_{s}({x:?})");
    println!("  projected    {:?}", r.projected.as_slice());
    println!("  kept indices {:?} (1-based)", r.chosen.one_based());
    println!("  tie occurred {}", r.tie_occurred);
    if r.alternatives.len() > 1 {
        println!("  all minimizing index sets:");
        for alt in &r.alternatives {
            println!("    {:?}", alt.one_based());
        }
    }
    println!();
}

fn main() {
    show("no tie", &[3.0, -1.0, 0.5, 2.0], 2);

    // |x_1| = |x_3| = 1: two equally near projections. The chosen one is
    // the lexicographically smallest index set.
    show("tie at the cut", &[1.0, -3.0, 1.0], 2);

    // Everything tied: all C(3,2) sets minimize the distance.
    show("full tie", &[2.0, -2.0, 2.0], 2);

    // One gradient-map step x - gamma*grad followed by the projection,
    // the basic IHT update.
    let x = DenseVector::new(vec![1.0, 0.0, 0.0, 0.5]).unwrap();
    let grad = DenseVector::new(vec![0.2, -0.9, 0.1, 0.4]).unwrap();
    let budget = SparsityBudget::new(2, 4).unwrap();
    let r = ht_gradient_map(&x, &grad, 0.5, budget).unwrap();
    println!("gradient map: H_2(x - 0.5*grad)");
    println!("  projected    {:?}", r.projected.as_slice());
    println!("  kept indices {:?}", r.chosen.one_based());
}

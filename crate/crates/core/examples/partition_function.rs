//! Perturbative free energy of the toy theory amplified by 2x2 matrices:
//! the sum over ribbon graphs against direct Wick contraction.

use cyheat::partition::{feynman_sum, wick_oracle, Slice, Truncation};
use cyheat::builtins;

fn main() {
    let alg = builtins::toy().matrix_amplify(2);
    let tr = Truncation { chi_min: 0, n_max: 3 };
    let (graphs, weights) = feynman_sum(&alg, None, 1, 0.5, tr).unwrap();
    let wick = wick_oracle(&Slice::new(&alg, 1, None).unwrap(), 0.5, tr).unwrap();
    println!("{} graph classes", weights.len());
    for (j, m, z) in graphs.coefficients().into_iter().filter(|c| c.2.norm() > 1e-12).take(12) {
        let w = wick.coefficient(j, &m);
        println!("λ^{j} {m:?}: graphs {:+.8} wick {:+.8}", z.re, w.re);
    }
    println!("max relative gap {:.1e}", graphs.relative_difference(&wick, 1e-6 * graphs.max_abs()));
}

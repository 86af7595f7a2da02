//! Enumerate connected trivalent ribbon graphs by genus, boundary count and
//! number of legs, with automorphism orders and the resulting orbifold
//! Euler characteristic `Σ 1/|Aut|`.

use cyheat::ribbon::enumerate_trivalent;

fn main() {
    for (g, h, n) in [(1, 1, 0), (0, 3, 0), (0, 2, 1), (1, 1, 1), (0, 4, 0), (1, 2, 0)] {
        let classes = enumerate_trivalent(g, h, n).unwrap();
        let mut auts: Vec<usize> = classes.iter().map(|c| c.automorphisms).collect();
        auts.sort_unstable();
        let orbifold: f64 = auts.iter().map(|&a| 1.0 / a as f64).sum();
        println!("(g,h,n) = ({g},{h},{n}): {} classes, |Aut| = {auts:?}, Σ 1/|Aut| = {orbifold:.4}", classes.len());
    }
}

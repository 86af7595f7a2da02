//! Transfer the dg algebra structure of a matrix algebra over a Grassmann
//! algebra to its harmonic subspace and check the resulting cyclic A∞
//! products against the tree forms with edges at infinite length.

use cyheat::ainfinity::{hpl_products, tree_form_residual};
use cyheat::{builtins, Spectral};

fn main() {
    let sp = Spectral::new(&builtins::matrix_grassmann()).unwrap();
    let a = hpl_products(&sp, 4).unwrap();
    println!("harmonic rank {}, parities {:?}", a.rank(), a.parity);
    for n in 2..=4 {
        let m = a.m(n).unwrap();
        let size = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        println!(
            "m_{n}: max entry {size:.4}, cyclicity {:.1e}, tree forms {:.1e}",
            a.cyclicity_residual(n).unwrap(),
            tree_form_residual(&sp, &a, n).unwrap()
        );
    }
    for n in 3..=5 {
        println!("A∞ relation at arity {n}: {:.1e}", a.relation_residual(n).unwrap());
    }
}

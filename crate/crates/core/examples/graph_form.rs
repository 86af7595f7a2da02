//! Evaluate the form of a theta graph with two legs and check restriction,
//! closedness and gluing at one metric.

use cyheat::forms::{closedness_check, gluing_check, restriction_check, FormContext, Tensor};
use cyheat::linalg::basis_vector;
use cyheat::ribbon::zoo;
use cyheat::{builtins, Length, Spectral};

fn main() {
    let alg = builtins::matrix_grassmann();
    let sp = Spectral::new(&alg).unwrap();
    let g = zoo::theta_with_legs(false);
    let ctx = FormContext::with_default(&sp, g.clone());
    let lengths: Vec<Length> = [0.4, 0.7, 1.1, 0.3, 0.5].into_iter().map(Length::Finite).collect();
    let f = Tensor::from_vectors(alg.dim(), &[basis_vector(alg.dim(), 2)]);
    for s in [vec![], vec![0], vec![1], vec![0, 2]] {
        let c = ctx.coefficient(&lengths, &s, &f).unwrap();
        println!("c_{s:?} has max entry {:.4}", c.max_abs());
    }
    let t = g.default_trivialization();
    let r = restriction_check(&sp, &g, &t, 0, &lengths, &[1], &f).unwrap();
    println!("restriction to l_0 = 0 on dl_1: residual {:.1e} (scale {:.2})", r.residual, r.scale);
    let cl = closedness_check(&ctx, &lengths, &[1], &f).unwrap();
    println!("closedness on dl_1: residual {:.1e} (scale {:.2})", cl.residual, cl.scale);
    let cor = zoo::corolla(2);
    let inputs = Tensor::from_vectors(alg.dim(), &[basis_vector(alg.dim(), 1), basis_vector(alg.dim(), 6)]);
    let l1: Vec<Length> = [0.2, 0.9, 0.6].into_iter().map(Length::Finite).collect();
    let gl = gluing_check(&sp, &cor, &cor.default_trivialization(), &g, &t, &l1, &lengths, &inputs).unwrap();
    println!("gluing corolla into theta: residual {:.1e} (scale {:.2})", gl.residual, gl.scale);
}

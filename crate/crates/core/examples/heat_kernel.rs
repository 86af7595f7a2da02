//! Spectrum of the Hamiltonian, Hodge decomposition and the heat-kernel
//! identities for a few built-in algebras.

use cyheat::{builtins, Spectral};

fn main() {
    for name in ["toy", "lambda", "toy-lambda", "matrix-grassmann"] {
        let sp = Spectral::new(&builtins::by_name(name).unwrap()).unwrap();
        let report = sp.report(&[0.1, 1.0, 10.0]);
        println!(
            "{name}: eigenvalues {:?}; dim Im Q = {}, dim Ker H = {}, dim Im Q† = {}",
            report.eigenvalues, report.dim_im_q, report.dim_ker_h, report.dim_im_qdag
        );
        let worst_identity = report
            .identity_residuals
            .iter()
            .flat_map(|(_, rs)| rs.iter().take(6))
            .map(|r| r.value)
            .fold(0.0, f64::max);
        let worst_hodge = report.hodge_residuals.iter().map(|r| r.value).fold(0.0, f64::max);
        println!("  identities {worst_identity:.1e}, Hodge {worst_hodge:.1e}");
    }
}

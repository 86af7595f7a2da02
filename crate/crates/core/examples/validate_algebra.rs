//! Build the toy algebra, round-trip it through its JSON file format and
//! check the dg Frobenius axioms.

use cyheat::{builtins, AlgebraFile, CyAlgebra};

fn main() {
    let toy = builtins::toy();
    let text = serde_json::to_string_pretty(&toy.to_file()).unwrap();
    println!("{text}");
    let file: AlgebraFile = serde_json::from_str(&text).unwrap();
    let back = CyAlgebra::from_file(&file).unwrap();
    let report = back.validate();
    for r in &report.residuals {
        println!("{:<28} {:>10.2e}  (tol {:.0e})", r.name, r.value, r.tolerance);
    }
    println!("valid: {}", report.pass);
}

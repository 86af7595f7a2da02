//! Run the restriction, gluing and closedness identities over the standard
//! graph battery at random metrics.

use cyheat::battery::run_lemmas;
use cyheat::{builtins, Spectral};

fn main() {
    let sp = Spectral::new(&builtins::lambda()).unwrap();
    let r = run_lemmas(&sp, 2, 1).unwrap();
    println!("graphs: {}", r.graphs.join(", "));
    println!("restriction {:?}", r.restriction);
    println!("gluing      {:?}", r.gluing);
    println!("closedness  {:?}", r.closedness);
}

mod common;

use common::enumeration::{brute_force_classes, signatures};
use cyheat::ribbon::enumerate_trivalent;

#[test]
fn enumerator_matches_brute_force() {
    for (v, g, h, n) in signatures(4) {
        let t = std::time::Instant::now();
        let oracle = brute_force_classes(v, g, h, n);
        let mut ours: Vec<usize> = enumerate_trivalent(g, h, n).unwrap().iter().map(|c| c.automorphisms).collect();
        ours.sort_unstable();
        eprintln!("v={v} g={g} h={h} n={n}: {} classes ({:?})", ours.len(), t.elapsed());
        assert_eq!(ours, oracle, "(g,h,n)=({g},{h},{n})");
    }
}

mod common;

use common::*;
use cyheat::builtins;
use cyheat::forms::{EdgeRole, FormContext};
use cyheat::ribbon::{zoo, Length};
use cyheat::Spectral;
use rand::Rng;

#[test]
fn contraction_matches_brute_force() {
    let mut r = rng(7);
    let graphs = vec![
        zoo::unit(),
        zoo::corolla(2),
        zoo::tree3(true),
        zoo::theta_with_legs(false),
        zoo::theta_with_legs(true),
        zoo::theta_one_leg(),
        zoo::theta_genus_one(),
        zoo::dumbbell(),
    ];
    for alg in [builtins::toy(), builtins::lambda(), builtins::grassmann()] {
        let sp = Spectral::new(&alg).unwrap();
        let n = alg.dim();
        for g in &graphs {
            for _ in 0..3 {
                let t = random_trivialization(&mut r, g);
                let ctx = FormContext::new(&sp, g.clone(), t.clone()).unwrap();
                let in_s: Vec<bool> = (0..g.num_edges()).map(|_| r.gen_bool(0.5)).collect();
                let kernels: Vec<_> = in_s
                    .iter()
                    .map(|&s| ctx.edge_kernel(Length::Finite(r.gen_range(0.2..1.5)), s, EdgeRole::Plain))
                    .collect();
                let f = random_tensor(&mut r, n, g.incoming().len());
                let fast = ctx.contract(&kernels, &in_s, &f).unwrap();
                let slow = brute_force(&alg, g, &t, &kernels, &in_s, &f);
                let scale = slow.max_abs().max(1.0);
                assert!(
                    fast.max_abs_diff(&slow) < 1e-12 * scale,
                    "{} edges, S {:?}: {:?} vs {:?}",
                    g.num_edges(),
                    in_s,
                    fast.data,
                    slow.data
                );
            }
        }
    }
}

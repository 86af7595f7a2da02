mod common;

use common::*;
use cyheat::builtins;
use cyheat::forms::{closedness_check, covariance_check, gluing_check, restriction_check, subsets, FormContext, Integration};
use cyheat::ribbon::{zoo, Length, RibbonGraph};
use cyheat::Spectral;
use rand::Rng;

fn graphs() -> Vec<RibbonGraph> {
    vec![
        zoo::corolla(2),
        zoo::tree3(true),
        zoo::tree3(false),
        zoo::theta_with_legs(false),
        zoo::theta_with_legs(true),
        zoo::theta_one_leg(),
    ]
}

fn lengths(r: &mut impl Rng, g: &RibbonGraph) -> Vec<Length> {
    (0..g.num_edges()).map(|_| Length::Finite(r.gen_range(0.2..1.5))).collect()
}

#[test]
fn restriction_with_random_trivializations() {
    let mut r = rng(11);
    for alg in [builtins::matrix_grassmann(), builtins::lambda(), builtins::toy()] {
        let sp = Spectral::new(&alg).unwrap();
        for g in graphs() {
            let t = random_trivialization(&mut r, &g);
            let l = lengths(&mut r, &g);
            let f = random_tensor(&mut r, alg.dim(), g.incoming().len());
            for e in g.internal_edges().into_iter().filter(|&e| !g.is_loop(e)) {
                let others: Vec<usize> = (0..g.num_edges()).filter(|&x| x != e).collect();
                for s in subsets(&others) {
                    let ch = restriction_check(&sp, &g, &t, e, &l, &s, &f).unwrap();
                    assert!(ch.residual <= 1e-10 * ch.scale.max(1.0), "edge {e} S {s:?}: {ch:?}");
                }
            }
        }
    }
}

#[test]
fn covariance_under_trivialization_change() {
    let mut r = rng(12);
    for alg in [builtins::matrix_grassmann(), builtins::lambda()] {
        let sp = Spectral::new(&alg).unwrap();
        for g in graphs() {
            let t1 = random_trivialization(&mut r, &g);
            let t2 = random_trivialization(&mut r, &g);
            let l = lengths(&mut r, &g);
            let f = random_tensor(&mut r, alg.dim(), g.incoming().len());
            let all: Vec<usize> = (0..g.num_edges()).collect();
            for s in subsets(&all) {
                let ch = covariance_check(&sp, &g, &t1, &t2, &l, &s, &f).unwrap();
                assert!(ch.residual <= 1e-10 * ch.scale.max(1.0), "{s:?}: {ch:?}");
            }
        }
    }
}

#[test]
fn closedness_all_degrees() {
    let mut r = rng(13);
    for alg in [builtins::matrix_grassmann(), builtins::lambda(), builtins::toy()] {
        let sp = Spectral::new(&alg).unwrap();
        for g in graphs() {
            let t = random_trivialization(&mut r, &g);
            let ctx = FormContext::new(&sp, g.clone(), t).unwrap();
            let l = lengths(&mut r, &g);
            let f = random_tensor(&mut r, alg.dim(), g.incoming().len());
            let all: Vec<usize> = (0..g.num_edges()).collect();
            for s in subsets(&all) {
                let ch = closedness_check(&ctx, &l, &s, &f).unwrap();
                assert!(ch.residual <= 1e-9 * ch.scale.max(1.0), "{s:?}: {ch:?}");
            }
        }
    }
}

#[test]
fn gluing_with_random_trivializations() {
    let mut r = rng(14);
    let u = zoo::unit();
    let cor = zoo::corolla(2);
    let thl = zoo::theta_with_legs(false);
    let pairs = vec![
        (cor.clone(), u.clone()),
        (cor.clone(), thl.clone()),
        (u.disjoint_union(&thl), cor.clone()),
        (cor.disjoint_union(&u), cor.clone()),
        (cor.disjoint_union(&u).disjoint_union(&u), zoo::tree3(false)),
        (u.disjoint_union(&u), thl.disjoint_union(&u)),
    ];
    for alg in [builtins::matrix_grassmann(), builtins::lambda(), builtins::toy()] {
        let sp = Spectral::new(&alg).unwrap();
        for (g1, g2) in &pairs {
            let t1 = random_trivialization(&mut r, g1);
            let t2 = random_trivialization(&mut r, g2);
            let l1 = lengths(&mut r, g1);
            let l2 = lengths(&mut r, g2);
            let f = random_tensor(&mut r, alg.dim(), g1.incoming().len());
            let ch = gluing_check(&sp, g1, &t1, g2, &t2, &l1, &l2, &f).unwrap();
            assert!(ch.residual <= 1e-10 * ch.scale.max(1.0), "{ch:?}");
        }
    }
}

#[test]
fn closed_integral_matches_quadrature() {
    let alg = builtins::matrix_grassmann();
    let sp = Spectral::new(&alg).unwrap();
    let mut r = rng(15);
    for g in [zoo::tree3(true), zoo::theta_one_leg()] {
        let ctx = FormContext::with_default(&sp, g.clone());
        let l: Vec<Length> = (0..g.num_edges()).map(|_| Length::Finite(0.4)).collect();
        let f = random_tensor(&mut r, alg.dim(), g.incoming().len());
        let a = ctx.integrate_top(0.5, &l, &f, Integration::Closed).unwrap();
        let b = ctx.integrate_top(0.5, &l, &f, Integration::Quadrature { rel_tol: 1e-7 }).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-5 * a.max_abs().max(1e-12), "{:?} {:?}", a.data, b.data);
    }
}

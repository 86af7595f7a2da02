//! End-to-end acceptance suite: one pass/fail line per criterion.

mod common;

use common::enumeration::{brute_force_classes, signatures};
use cyheat::ainfinity::{hpl_products, hpl_products_in, tree_form_residual};
use cyheat::battery::run_lemmas;
use cyheat::forms::{FormContext, Integration, Tensor};
use cyheat::linalg::{max_abs, max_abs_diff, max_abs_slice, Mat, Vector, C64, ONE, ZERO};
use cyheat::partition::{feynman_sum, harmonic_basis, wick_oracle, Series, Slice, Truncation};
use cyheat::ribbon::{enumerate_trivalent, zoo};
use cyheat::{builtins, CyAlgebra, Length, Spectral, Time};
use rand::{Rng, SeedableRng};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn run(index: usize, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err("panicked".into()));
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(b) = budget {
        if elapsed > b {
            pass = false;
            detail = format!("{detail}; over the {}s budget", b.as_secs());
        }
    }
    println!(
        "criterion {index:>2} {} {name}: {detail} [{:.2}s]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn failing<T: std::fmt::Debug>(items: &[T]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!("; failing {items:?}")
    }
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spectral(name: &str) -> Spectral {
    Spectral::new(&builtins::by_name(name).unwrap()).unwrap()
}

fn toy_values() -> Outcome {
    let toy = builtins::toy();
    let sp = Spectral::new(&toy).unwrap();
    let e = |i: usize| cyheat::linalg::basis_vector(4, i);
    let q = toy.q();
    let mut worst: f64 = 0.0;
    let mut note = |r: f64| worst = worst.max(r);
    note((toy.trace(&e(3)) - ONE).norm());
    note((q * e(1) + e(2)).norm());
    note((sp.qdag() * e(2) + e(1)).norm());
    note((sp.hamiltonian() * e(1) - e(1)).norm());
    note((sp.hamiltonian() * e(2) - e(2)).norm());
    note((sp.hamiltonian() * e(0)).norm());
    note((sp.hamiltonian() * e(3)).norm());
    // S(b x) straight from the algebra
    for &b in &[-1.3, 0.25, 0.7, 2.0] {
        let a = e(1) * C64::new(b, 0.0);
        let s = toy.pairing(&a, &(q * &a)) * 0.5
            + toy.trace(&toy.multiply(&toy.multiply(&a, &a), &a)) / 3.0;
        note((s - C64::new(-0.5 * b * b + b * b * b / 3.0, 0.0)).norm() / b.abs().powi(3).max(1.0));
    }
    // and as the polynomial action on the slice
    let slice = Slice::new(&toy, 1, None).map_err(|e| e.to_string())?;
    let s = slice.action();
    let u = slice.num_sources as u16;
    let scale = slice.vectors[u as usize][1];
    note((s.coefficient(&[u, u]) * scale.powi(-2) - C64::new(-0.5, 0.0)).norm());
    note((s.coefficient(&[u, u, u]) * scale.powi(-3) - C64::new(1.0 / 3.0, 0.0)).norm());
    ensure(worst <= 1e-15, format!("max residual {worst:.2e} (tol 1e-15)"))
}

fn heat_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failed = vec![];
    for name in ["toy", "lambda", "toy-lambda", "toy-mat2"] {
        let sp = spectral(name);
        for t in [0.1, 1.0, 10.0] {
            for r in sp.identity_suite(t).map_err(|e| e.to_string())?.into_iter().take(6) {
                worst = worst.max(r.value);
                if r.value > 1e-12 {
                    failed.push(format!("{name} t={t} {}", r.name));
                }
            }
        }
    }
    ensure(failed.is_empty(), format!("max residual {worst:.2e} (tol 1e-12){}", failing(&failed)))
}

fn hodge() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failed = vec![];
    for (name, alg) in builtins::all() {
        for r in Spectral::new(&alg).unwrap().hodge_residuals() {
            worst = worst.max(r.value);
            if !(r.pass && r.value <= 1e-12) {
                failed.push(format!("{name} {}", r.name));
            }
        }
    }
    ensure(failed.is_empty(), format!("{} algebras, max residual {worst:.2e} (tol 1e-12){}", builtins::all().len(), failing(&failed)))
}

fn form_lemmas() -> Outcome {
    let names = ["matrix-grassmann", "lambda", "toy"];
    let mut worst: f64 = 0.0;
    let mut graphs = 0;
    let mut checks = 0;
    let mut scales = vec![];
    for name in names {
        let r = run_lemmas(&spectral(name), 5, 2024).map_err(|e| e.to_string())?;
        worst = worst.max(r.worst_relative());
        graphs = r.graphs.len();
        checks += r.restriction.checks + r.gluing.checks + r.closedness.checks;
        scales.push(format!("{name} {:.2}", r.restriction.scale.min(r.gluing.scale).min(r.closedness.scale)));
    }
    ensure(
        worst <= 1e-8 && graphs >= 10,
        format!(
            "{graphs} graphs x {} algebras x 5 metrics, {checks} checks, max relative residual {worst:.2e} (tol 1e-8); smallest term scale per algebra: {}",
            names.len(),
            scales.join(", ")
        ),
    )
}

fn moduli_integrals() -> Outcome {
    let sp = spectral("toy");
    let mut worst: f64 = 0.0;
    let mut values = vec![];
    for (name, g) in [("theta", zoo::theta_planar()), ("dumbbell", zoo::dumbbell())] {
        let ctx = FormContext::with_default(&sp, g.clone());
        let l = vec![Length::Finite(0.0); g.num_edges()];
        let f = Tensor::scalar(sp.dim(), ONE);
        let a = ctx.integrate_top(0.5, &l, &f, Integration::Closed).map_err(|e| e.to_string())?;
        let b = ctx
            .integrate_top(0.5, &l, &f, Integration::Quadrature { rel_tol: 1e-5 })
            .map_err(|e| e.to_string())?;
        let rel = a.max_abs_diff(&b) / a.max_abs().max(b.max_abs()).max(1e-300);
        worst = worst.max(rel);
        values.push(format!("{name} {:.10}", a.data[0].re));
    }
    ensure(worst <= 1e-4, format!("{}; max relative gap {worst:.2e} (tol 1e-4)", values.join(", ")))
}

/// Coefficientwise gap relative to the larger side, with a floor of `1e-6`
/// times the largest coefficient so round-off on vanishing terms is ignored.
fn series_gap(a: &Series, b: &Series) -> f64 {
    let top = a
        .coefficients()
        .iter()
        .chain(b.coefficients().iter())
        .map(|c| c.2.norm())
        .fold(0.0, f64::max);
    a.relative_difference(b, (1e-6 * top).max(1e-300))
}

fn partition_oracle() -> Outcome {
    let toy = builtins::toy();
    let tr = Truncation { chi_min: -1, n_max: 3 };
    let mut worst: f64 = 0.0;
    let mut classes = 0;
    for size in [1, 2] {
        for eps in [0.5, 1.0] {
            let (graphs, weights) = feynman_sum(&toy, None, size, eps, tr).map_err(|e| e.to_string())?;
            let slice = Slice::new(&toy, size, None).map_err(|e| e.to_string())?;
            let wick = wick_oracle(&slice, eps, tr).map_err(|e| e.to_string())?;
            worst = worst.max(series_gap(&graphs, &wick));
            classes = weights.len();
        }
    }
    // a source-carrying case: on TOY every source term vanishes identically
    let tm = builtins::by_name("toy-mat2").unwrap();
    let mut extra: f64 = 0.0;
    for tr in [Truncation { chi_min: 0, n_max: 3 }, Truncation { chi_min: -1, n_max: 2 }] {
        let (graphs, _) = feynman_sum(&tm, None, 1, 0.5, tr).map_err(|e| e.to_string())?;
        let wick = wick_oracle(&Slice::new(&tm, 1, None).map_err(|e| e.to_string())?, 0.5, tr).map_err(|e| e.to_string())?;
        extra = extra.max(series_gap(&graphs, &wick));
    }
    ensure(
        worst <= 1e-8 && extra <= 1e-8,
        format!("TOY N in {{1,2}}, eps in {{0.5,1}}, {classes} classes: max relative gap {worst:.2e}; TOY⊗Mat2 sources: {extra:.2e} (tol 1e-8)"),
    )
}

fn ainfinity() -> Outcome {
    let names = ["toy", "grassmann", "mat2", "matrix-grassmann", "toy-toy", "toy-mat2"];
    let (mut rel, mut cyc, mut tree) = (0.0f64, 0.0f64, 0.0f64);
    for name in names {
        let sp = spectral(name);
        let a = hpl_products(&sp, 4).map_err(|e| e.to_string())?;
        for n in 3..=5 {
            rel = rel.max(a.relation_residual(n).map_err(|e| e.to_string())?);
        }
        for n in 2..=4 {
            cyc = cyc.max(a.cyclicity_residual(n).map_err(|e| e.to_string())?);
        }
        for n in 2..=4 {
            tree = tree.max(tree_form_residual(&sp, &a, n).map_err(|e| e.to_string())?);
        }
    }
    ensure(
        rel <= 1e-10 && cyc <= 1e-10 && tree <= 1e-8,
        format!("{} algebras: relations {rel:.2e}, cyclicity {cyc:.2e} (tol 1e-10), tree forms {tree:.2e} (tol 1e-8)", names.len()),
    )
}

fn infinite_edge() -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, alg) in builtins::all() {
        let sp = Spectral::new(&alg).unwrap();
        let k = sp.kernel_of_operator(&sp.heat_operator(Time::Finite(40.0)));
        worst = worst.max(max_abs(&(sp.convolution_operator(&k) - sp.harmonic_projector())));
    }
    ensure(worst <= 1e-12, format!("{} algebras, max residual {worst:.2e} (tol 1e-12)", builtins::all().len()))
}

fn random_basis_change(alg: &CyAlgebra, r: &mut impl Rng) -> Mat {
    let n = alg.dim();
    Mat::from_fn(n, n, |i, j| {
        if alg.parity_of(i) != alg.parity_of(j) {
            ZERO
        } else {
            C64::new(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5)) + if i == j { ONE } else { ZERO }
        }
    })
}

/// Largest gap between two coefficient lists, relative to `max(1, |a|, |b|)`.
fn coefficient_gap(a: &Series, b: &Series) -> f64 {
    a.relative_difference(b, 1.0)
}

fn invariance() -> Outcome {
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let tr = Truncation { chi_min: -1, n_max: 3 };
    let mut lines = vec![];
    let mut worst: f64 = 0.0;
    for name in ["toy-lambda", "toy", "matrix-grassmann", "toy-mat2"] {
        let a = builtins::by_name(name).unwrap();
        let p = random_basis_change(&a, &mut r);
        let b = a.transport(&p).map_err(|e| e.to_string())?;
        let (sa, sb) = (Spectral::new(&a).unwrap(), Spectral::new(&b).unwrap());
        let ha = harmonic_basis(&sa);
        let pinv = p.clone().try_inverse().unwrap();
        let hb: Vec<(Vector, u8)> = ha.iter().map(|(v, q)| (&pinv * v, *q)).collect();
        let za = wick_oracle(&Slice::new(&a, 1, Some(ha.clone())).map_err(|e| e.to_string())?, 0.5, tr).map_err(|e| e.to_string())?;
        let zb = wick_oracle(&Slice::new(&b, 1, Some(hb.clone())).map_err(|e| e.to_string())?, 0.5, tr).map_err(|e| e.to_string())?;
        let mut gap = coefficient_gap(&za, &zb);
        if name == "toy-lambda" {
            let (ga, _) = feynman_sum(&a, Some(ha.clone()), 1, 0.5, tr).map_err(|e| e.to_string())?;
            let (gb, _) = feynman_sum(&b, Some(hb.clone()), 1, 0.5, tr).map_err(|e| e.to_string())?;
            gap = gap.max(coefficient_gap(&ga, &gb));
        }
        let ma = hpl_products_in(&sa, ha, 5).map_err(|e| e.to_string())?;
        let mb = hpl_products_in(&sb, hb, 5).map_err(|e| e.to_string())?;
        let mut size: f64 = 0.0;
        for n in 2..=5 {
            let (x, y) = (ma.m(n).map_err(|e| e.to_string())?, mb.m(n).map_err(|e| e.to_string())?);
            size = size.max(max_abs_slice(&x));
            gap = gap.max(max_abs_diff(&x, &y) / max_abs_slice(&x).max(1.0));
        }
        let zmax = za.coefficients().iter().map(|c| c.2.norm()).fold(0.0, f64::max);
        lines.push(format!("{name} {gap:.1e} (|Z| {zmax:.2}, |m| {size:.2})"));
        worst = worst.max(gap);
    }
    ensure(worst <= 1e-10, format!("random parity-preserving basis transport: {} (tol 1e-10)", lines.join(", ")))
}

fn enumeration() -> Outcome {
    let mut total = 0;
    let mut bad = vec![];
    for (v, g, h, n) in signatures(4) {
        let oracle = brute_force_classes(v, g, h, n);
        let mut ours: Vec<usize> = enumerate_trivalent(g, h, n)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|c| c.automorphisms)
            .collect();
        ours.sort_unstable();
        total += ours.len();
        if ours != oracle {
            bad.push(format!("({g},{h},{n}): {} vs {}", ours.len(), oracle.len()));
        }
    }
    ensure(
        bad.is_empty(),
        format!("{} signatures, {total} classes, counts and |Aut| multisets compared{}", signatures(4).len(), failing(&bad)),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "toy algebra values", None, toy_values),
        run(2, "heat-kernel identities", Some(secs(5)), heat_identities),
        run(3, "Hodge structure", None, hodge),
        run(4, "form lemmas", Some(secs(120)), form_lemmas),
        run(5, "closed form vs quadrature", Some(secs(60)), moduli_integrals),
        run(6, "Feynman sum vs Wick oracle", Some(secs(300)), partition_oracle),
        run(7, "A-infinity relations, cyclicity, tree forms", Some(secs(120)), ainfinity),
        run(8, "infinite-edge limit", None, infinite_edge),
        run(9, "invariance under basis transport", None, invariance),
        run(10, "enumeration vs brute force", Some(secs(120)), enumeration),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

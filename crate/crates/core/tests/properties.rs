use cyheat::algebra::builtins;
use cyheat::linalg::{basis_vector, Vector, C64};
use cyheat::ribbon::{det_sign, zoo, RibbonGraph};
use proptest::prelude::*;

fn vector(coords: &[(f64, f64)]) -> Vector {
    Vector::from_iterator(coords.len(), coords.iter().map(|&(a, b)| C64::new(a, b)))
}

fn coords(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
}

fn battery() -> Vec<(&'static str, RibbonGraph)> {
    vec![
        ("theta_planar", zoo::theta_planar()),
        ("theta_genus_one", zoo::theta_genus_one()),
        ("dumbbell", zoo::dumbbell()),
        ("tree3", zoo::tree3(true)),
        ("theta_legs", zoo::theta_with_legs(false)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(name in prop::sample::select(vec!["toy", "lambda", "grassmann", "toy-mat2"]),
                              seed in coords(16 * 3)) {
        let alg = builtins::by_name(name).unwrap();
        let n = alg.dim();
        let (a, b, c) = (vector(&seed[..n]), vector(&seed[16..16 + n]), vector(&seed[32..32 + n]));
        let lhs = alg.multiply(&alg.multiply(&a, &b), &c);
        let rhs = alg.multiply(&a, &alg.multiply(&b, &c));
        prop_assert!(cyheat::linalg::max_abs_diff(lhs.as_slice(), rhs.as_slice()) < 1e-12);
    }

    #[test]
    fn pairing_is_graded_symmetric(name in prop::sample::select(vec!["toy", "lambda", "grassmann", "toy-lambda"]),
                                   i in 0usize..8, j in 0usize..8) {
        let alg = builtins::by_name(name).unwrap();
        let (i, j) = (i % alg.dim(), j % alg.dim());
        let (ei, ej) = (basis_vector(alg.dim(), i), basis_vector(alg.dim(), j));
        let sign = if alg.parity_of(i) * alg.parity_of(j) % 2 == 1 { -1.0 } else { 1.0 };
        let gap = alg.pairing(&ei, &ej) - alg.pairing(&ej, &ei) * sign;
        prop_assert!(gap.norm() < 1e-12);
    }

    #[test]
    fn contraction_preserves_euler_characteristic(k in 0usize..5, e in 0usize..8) {
        let (_, g) = &battery()[k];
        let internal: Vec<usize> = g.internal_edges().into_iter().filter(|&x| !g.is_loop(x)).collect();
        prop_assume!(!internal.is_empty());
        let c = g.contract_edge(internal[e % internal.len()]).unwrap();
        prop_assert_eq!(c.graph.topology().chi, g.topology().chi);
        prop_assert_eq!(c.graph.genus_boundaries(), g.genus_boundaries());
    }

    #[test]
    fn det_sign_is_multiplicative(k in 0usize..5, seeds in prop::collection::vec(any::<u64>(), 3)) {
        use rand::SeedableRng;
        let (_, g) = &battery()[k];
        let t: Vec<_> = seeds
            .iter()
            .map(|&s| cyheat::battery::random_trivialization(&mut rand_chacha::ChaCha8Rng::seed_from_u64(s), g))
            .collect();
        prop_assert_eq!(det_sign(&t[0], &t[1]) * det_sign(&t[1], &t[2]), det_sign(&t[0], &t[2]));
    }
}

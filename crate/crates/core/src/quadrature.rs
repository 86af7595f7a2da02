//! Globally adaptive Gauss-Kronrod (7/15) quadrature for vector-valued integrands.

use crate::linalg::{C64, ZERO};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("no convergence after {intervals} intervals: error estimate {error:e}")]
    NoConvergence { intervals: usize, error: f64 },
}

const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Piece {
    a: f64,
    b: f64,
    value: Vec<C64>,
    error: f64,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rule(f: &mut dyn FnMut(f64) -> Vec<C64>, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron: Vec<C64> = fc.iter().map(|z| z * WK[7]).collect();
    let mut gauss: Vec<C64> = fc.iter().map(|z| z * WG[3]).collect();
    for j in 0..7 {
        let x = h * XK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        for (k, (u, v)) in f1.iter().zip(&f2).enumerate() {
            kron[k] += (u + v) * WK[j];
            if j % 2 == 1 {
                gauss[k] += (u + v) * WG[j / 2];
            }
        }
    }
    let value: Vec<C64> = kron.iter().map(|z| z * h).collect();
    let diff: Vec<C64> = kron.iter().zip(&gauss).map(|(k, g)| (k - g) * h).collect();
    Piece {
        a,
        b,
        value,
        error: norm(&diff),
    }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)` in the
/// Euclidean norm, bisecting the worst interval each step.
pub fn integrate(
    f: &mut dyn FnMut(f64) -> Vec<C64>,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<(Vec<C64>, f64), QuadratureError> {
    let mut pieces = vec![rule(f, a, b)];
    loop {
        let n = pieces[0].value.len();
        let mut total = vec![ZERO; n];
        let mut err = 0.0;
        for p in &pieces {
            for (t, v) in total.iter_mut().zip(&p.value) {
                *t += v;
            }
            err += p.error;
        }
        if err <= abs_tol.max(rel_tol * norm(&total)) {
            return Ok((total, err));
        }
        if pieces.len() >= max_intervals {
            return Err(QuadratureError::NoConvergence {
                intervals: pieces.len(),
                error: err,
            });
        }
        let worst = (0..pieces.len())
            .max_by(|&i, &j| pieces[i].error.total_cmp(&pieces[j].error))
            .unwrap();
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        pieces.push(rule(f, p.a, mid));
        pieces.push(rule(f, mid, p.b));
    }
}

/// Integrates over `[lo, ∞)` through `t = lo + u / (1 - u)`.
pub fn integrate_to_infinity(
    f: &mut dyn FnMut(f64) -> Vec<C64>,
    lo: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<(Vec<C64>, f64), QuadratureError> {
    let mut g = |u: f64| {
        let s = 1.0 - u;
        let jac = 1.0 / (s * s);
        f(lo + u / s).into_iter().map(|z| z * jac).collect()
    };
    integrate(&mut g, 0.0, 1.0, abs_tol, rel_tol, max_intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn exponential_tail() {
        let mut f = |t: f64| vec![c((-2.0 * t).exp()), c(t * (-t).exp())];
        let (v, _) = integrate_to_infinity(&mut f, 0.5, 1e-14, 1e-12, 200).unwrap();
        assert!((v[0].re - (-1.0f64).exp() / 2.0).abs() < 1e-11);
        assert!((v[1].re - 1.5 * (-0.5f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn polynomial_exact() {
        let mut f = |x: f64| vec![c(x.powi(5) - 2.0 * x)];
        let (v, _) = integrate(&mut f, -1.0, 2.0, 1e-14, 1e-14, 10).unwrap();
        assert!((v[0].re - (64.0 / 6.0 - 1.0 / 6.0 - 3.0)).abs() < 1e-12);
    }
}

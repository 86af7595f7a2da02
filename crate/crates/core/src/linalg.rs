//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `(-1)^k` as a float.
#[inline]
pub fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_slice(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn basis_vector(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = ONE;
    v
}

/// Numerical rank from singular values with a relative cutoff.
pub fn rank(m: &Mat, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * top.max(1.0)).count()
}

/// Orthonormal basis (Euclidean) for the column space of `m`.
pub fn column_space(m: &Mat, tol: f64) -> Mat {
    let n = m.nrows();
    if m.ncols() == 0 {
        return Mat::zeros(n, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd u");
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > tol)
        .map(|(i, _)| i)
        .collect();
    let mut out = Mat::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &u.column(i));
    }
    out
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

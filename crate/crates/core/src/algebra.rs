//! Finite-dimensional Calabi-Yau dg Frobenius algebras.
//!
//! A basis `e_0..e_{n-1}` carries a parity and optionally an integer degree.
//! The product is stored densely as `m[i][j][k]` with `e_i e_j = sum_k m[i][j][k] e_k`,
//! the differential as a matrix acting on coordinate columns
//! (`Q e_j = sum_i Q[i][j] e_i`), and the trace as the vector of `Tr(e_i)`.
//! An optional antilinear Hodge star `*a = S conj(a)` supplies the metric.

use crate::linalg::{c, kron, max_abs, rank, sign, Mat, Vector, C64, ONE, ZERO};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const VALIDATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("field `{field}`: expected length {expected}, found {found}")]
    Length {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("field `{field}`: index {index} out of range for dimension {dim}")]
    Index {
        field: &'static str,
        index: usize,
        dim: usize,
    },
    #[error("field `{field}`: parity must be 0 or 1, found {value}")]
    Parity { field: &'static str, value: u8 },
    #[error("field `degree`: degree {degree} of basis element {index} disagrees with parity")]
    DegreeParity { index: usize, degree: i32 },
    #[error("dimension must be positive")]
    EmptyBasis,
    #[error("basis change matrix is singular or mixes parities")]
    BadBasisChange,
    #[error("unknown builtin algebra `{0}`")]
    UnknownBuiltin(String),
}

/// JSON layout of an algebra file. Indices are 0-based.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct AlgebraFile {
    pub dim: usize,
    pub basis_names: Vec<String>,
    pub parity: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<Vec<i32>>,
    pub mult: Vec<(usize, usize, usize, f64, f64)>,
    pub trace: Vec<(usize, f64, f64)>,
    #[serde(rename = "Q")]
    pub q: Vec<(usize, usize, f64, f64)>,
    pub p: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<Vec<(usize, usize, f64, f64)>>,
}

#[derive(Debug, Clone)]
pub struct CyAlgebra {
    names: Vec<String>,
    parity: Vec<u8>,
    degree: Option<Vec<i32>>,
    mult: Vec<C64>,
    trace: Vec<C64>,
    q: Mat,
    p: u8,
    star: Option<Mat>,
}

/// A single named residual in a validation report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Residual {
    pub fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Residual {
            name: name.to_string(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub dim: usize,
    pub residuals: Vec<Residual>,
    pub pairing_rank: usize,
    pub pass: bool,
}

impl CyAlgebra {
    /// Builds an algebra from dense data, checking shapes only.
    pub fn from_parts(
        names: Vec<String>,
        parity: Vec<u8>,
        degree: Option<Vec<i32>>,
        mult: Vec<C64>,
        trace: Vec<C64>,
        q: Mat,
        p: u8,
        star: Option<Mat>,
    ) -> Result<Self, AlgebraError> {
        let n = parity.len();
        if n == 0 {
            return Err(AlgebraError::EmptyBasis);
        }
        let check = |field, expected, found| {
            if expected != found {
                Err(AlgebraError::Length {
                    field,
                    expected,
                    found,
                })
            } else {
                Ok(())
            }
        };
        check("basisNames", n, names.len())?;
        check("mult", n * n * n, mult.len())?;
        check("trace", n, trace.len())?;
        check("Q", n * n, q.len())?;
        if let Some(d) = &degree {
            check("degree", n, d.len())?;
            for (i, (&deg, &par)) in d.iter().zip(&parity).enumerate() {
                if deg.rem_euclid(2) as u8 != par {
                    return Err(AlgebraError::DegreeParity { index: i, degree: deg });
                }
            }
        }
        if let Some(s) = &star {
            check("star", n * n, s.len())?;
        }
        for &x in parity.iter().chain(std::iter::once(&p)) {
            if x > 1 {
                return Err(AlgebraError::Parity {
                    field: "parity",
                    value: x,
                });
            }
        }
        if q.nrows() != n {
            return Err(AlgebraError::Length {
                field: "Q",
                expected: n,
                found: q.nrows(),
            });
        }
        Ok(CyAlgebra {
            names,
            parity,
            degree,
            mult,
            trace,
            q,
            p,
            star,
        })
    }

    pub fn from_file(f: &AlgebraFile) -> Result<Self, AlgebraError> {
        let n = f.dim;
        if n == 0 {
            return Err(AlgebraError::EmptyBasis);
        }
        if f.parity.len() != n {
            return Err(AlgebraError::Length {
                field: "parity",
                expected: n,
                found: f.parity.len(),
            });
        }
        let idx = |field: &'static str, i: usize| {
            if i >= n {
                Err(AlgebraError::Index {
                    field,
                    index: i,
                    dim: n,
                })
            } else {
                Ok(i)
            }
        };
        let mut mult = vec![ZERO; n * n * n];
        for &(i, j, k, re, im) in &f.mult {
            let (i, j, k) = (idx("mult", i)?, idx("mult", j)?, idx("mult", k)?);
            mult[(i * n + j) * n + k] += C64::new(re, im);
        }
        let mut trace = vec![ZERO; n];
        for &(i, re, im) in &f.trace {
            trace[idx("trace", i)?] += C64::new(re, im);
        }
        let mut q = Mat::zeros(n, n);
        for &(i, j, re, im) in &f.q {
            q[(idx("Q", i)?, idx("Q", j)?)] += C64::new(re, im);
        }
        let star = match &f.star {
            None => None,
            Some(entries) => {
                let mut s = Mat::zeros(n, n);
                for &(i, j, re, im) in entries {
                    s[(idx("star", i)?, idx("star", j)?)] += C64::new(re, im);
                }
                Some(s)
            }
        };
        Self::from_parts(
            f.basis_names.clone(),
            f.parity.clone(),
            f.degree.clone(),
            mult,
            trace,
            q,
            f.p,
            star,
        )
    }

    pub fn to_file(&self) -> AlgebraFile {
        let n = self.dim();
        let mut mult = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let z = self.m(i, j, k);
                    if z != ZERO {
                        mult.push((i, j, k, z.re, z.im));
                    }
                }
            }
        }
        let trace = (0..n)
            .filter(|&i| self.trace[i] != ZERO)
            .map(|i| (i, self.trace[i].re, self.trace[i].im))
            .collect();
        let sparse = |m: &Mat| {
            let mut out = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let z = m[(i, j)];
                    if z != ZERO {
                        out.push((i, j, z.re, z.im));
                    }
                }
            }
            out
        };
        AlgebraFile {
            dim: n,
            basis_names: self.names.clone(),
            parity: self.parity.clone(),
            degree: self.degree.clone(),
            mult,
            trace,
            q: sparse(&self.q),
            p: self.p,
            star: self.star.as_ref().map(sparse),
        }
    }

    pub fn dim(&self) -> usize {
        self.parity.len()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn parity(&self) -> &[u8] {
        &self.parity
    }
    pub fn parity_of(&self, i: usize) -> u8 {
        self.parity[i]
    }
    pub fn degree(&self) -> Option<&[i32]> {
        self.degree.as_deref()
    }
    /// Parity `p(A)` of the trace map.
    pub fn p(&self) -> u8 {
        self.p
    }
    pub fn q(&self) -> &Mat {
        &self.q
    }
    pub fn trace_vec(&self) -> &[C64] {
        &self.trace
    }
    pub fn star(&self) -> Option<&Mat> {
        self.star.as_ref()
    }
    pub fn with_star(mut self, s: Mat) -> Self {
        self.star = Some(s);
        self
    }
    pub fn with_trace(mut self, tr: Vec<C64>) -> Self {
        assert_eq!(tr.len(), self.dim());
        self.trace = tr;
        self
    }
    pub fn with_q(mut self, q: Mat) -> Self {
        assert_eq!(q.nrows(), self.dim());
        self.q = q;
        self
    }

    #[inline]
    pub fn m(&self, i: usize, j: usize, k: usize) -> C64 {
        let n = self.dim();
        self.mult[(i * n + j) * n + k]
    }
    /// Structure constants as a flat slice indexed `(i*n + j)*n + k`.
    pub fn mult_slice(&self) -> &[C64] {
        &self.mult
    }

    pub fn multiply(&self, a: &Vector, b: &Vector) -> Vector {
        let n = self.dim();
        assert_eq!(a.len(), n);
        assert_eq!(b.len(), n);
        let mut out = Vector::zeros(n);
        for i in 0..n {
            if a[i] == ZERO {
                continue;
            }
            for j in 0..n {
                let ab = a[i] * b[j];
                if ab == ZERO {
                    continue;
                }
                let row = &self.mult[(i * n + j) * n..(i * n + j + 1) * n];
                for (k, z) in row.iter().enumerate() {
                    out[k] += ab * z;
                }
            }
        }
        out
    }

    pub fn trace(&self, a: &Vector) -> C64 {
        a.iter().zip(&self.trace).map(|(x, t)| x * t).sum()
    }

    pub fn pairing(&self, a: &Vector, b: &Vector) -> C64 {
        self.trace(&self.multiply(a, b))
    }

    /// `B[i][j] = Tr(e_i e_j)`.
    pub fn pairing_matrix(&self) -> Mat {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| {
            (0..n).map(|k| self.m(i, j, k) * self.trace[k]).sum()
        })
    }

    /// Left multiplication by `e_i` as a matrix on coordinates.
    pub fn left_mul(&self, i: usize) -> Mat {
        let n = self.dim();
        Mat::from_fn(n, n, |k, j| self.m(i, j, k))
    }

    /// Multiplication by an element from the left, as a matrix.
    pub fn left_mul_by(&self, a: &Vector) -> Mat {
        let n = self.dim();
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            if a[i] != ZERO {
                out += self.left_mul(i) * a[i];
            }
        }
        out
    }

    /// Diagonal matrix of `(-1)^{|e_i|}`.
    pub fn parity_diag(&self) -> Mat {
        Mat::from_diagonal(&Vector::from_iterator(
            self.dim(),
            self.parity.iter().map(|&x| c(sign(x as usize))),
        ))
    }

    /// Diagonal matrix of `(-1)^{p |e_i|}`.
    pub fn p_diag(&self) -> Mat {
        let p = self.p as usize;
        Mat::from_diagonal(&Vector::from_iterator(
            self.dim(),
            self.parity.iter().map(|&x| c(sign(p * x as usize))),
        ))
    }

    /// Splits an element into its even and odd parts.
    pub fn split_parity(&self, a: &Vector) -> [Vector; 2] {
        let mut even = a.clone();
        let mut odd = a.clone();
        for i in 0..self.dim() {
            if self.parity[i] == 0 {
                odd[i] = ZERO;
            } else {
                even[i] = ZERO;
            }
        }
        [even, odd]
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let tol = VALIDATION_TOL;
        let mut residuals = Vec::new();

        let mut assoc: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for r in 0..n {
                        let mut lhs = ZERO;
                        let mut rhs = ZERO;
                        for k in 0..n {
                            lhs += self.m(i, j, k) * self.m(k, l, r);
                            rhs += self.m(j, l, k) * self.m(i, k, r);
                        }
                        assoc = assoc.max((lhs - rhs).norm());
                    }
                }
            }
        }
        residuals.push(Residual::new("associativity", assoc, tol));

        let mut grading: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let z = self.m(i, j, k);
                    let bad_par = (self.parity[i] + self.parity[j]) % 2 != self.parity[k];
                    let bad_deg = self
                        .degree
                        .as_ref()
                        .is_some_and(|d| d[i] + d[j] != d[k]);
                    if bad_par || bad_deg {
                        grading = grading.max(z.norm());
                    }
                }
            }
        }
        residuals.push(Residual::new("grading", grading, tol));

        let mut q_odd: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let bad_par = self.parity[i] == self.parity[j];
                let bad_deg = self.degree.as_ref().is_some_and(|d| d[i] != d[j] + 1);
                if bad_par || bad_deg {
                    q_odd = q_odd.max(self.q[(i, j)].norm());
                }
            }
        }
        residuals.push(Residual::new("differential-odd", q_odd, tol));
        residuals.push(Residual::new(
            "differential-square",
            max_abs(&(&self.q * &self.q)),
            tol,
        ));

        let pd = self.parity_diag();
        let mut deriv: f64 = 0.0;
        for i in 0..n {
            let li = self.left_mul(i);
            let qei = self.q.column(i).into_owned();
            let l_qei = self.left_mul_by(&qei);
            // Q(e_i e_j) - (Q e_i) e_j - (-1)^{|i|} e_i (Q e_j), columns over j
            let d = &self.q * &li - l_qei - li * &self.q * pd[(i, i)];
            deriv = deriv.max(max_abs(&d));
        }
        residuals.push(Residual::new("derivation", deriv, tol));

        let mut tr_grade: f64 = 0.0;
        for i in 0..n {
            if self.parity[i] != self.p {
                tr_grade = tr_grade.max(self.trace[i].norm());
            }
        }
        residuals.push(Residual::new("trace-parity", tr_grade, tol));

        let tq = Vector::from_column_slice(&self.trace).transpose() * &self.q;
        residuals.push(Residual::new(
            "trace-closure",
            tq.iter().fold(0.0, |a, z| a.max(z.norm())),
            tol,
        ));

        let b = self.pairing_matrix();
        let mut sym: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s = sign((self.parity[i] * self.parity[j]) as usize);
                sym = sym.max((b[(i, j)] - b[(j, i)] * s).norm());
            }
        }
        residuals.push(Residual::new("trace-symmetry", sym, tol));

        let pairing_rank = rank(&b, 1e-10);
        let pass = residuals.iter().all(|r| r.pass) && pairing_rank == n;
        ValidationReport {
            dim: n,
            residuals,
            pairing_rank,
            pass,
        }
    }

    /// Graded tensor product with Koszul signs.
    ///
    /// `(a⊗b)(a'⊗b') = (-1)^{|b||a'|} aa'⊗bb'`, `Tr(a⊗b) = (-1)^{p_2|a|} Tr a Tr b`,
    /// `Q = Q_1⊗1 + (-1)^{|a|} 1⊗Q_2`.
    pub fn tensor(&self, other: &CyAlgebra) -> CyAlgebra {
        let (na, nb) = (self.dim(), other.dim());
        let n = na * nb;
        let idx = |i: usize, a: usize| i * nb + a;
        let parity: Vec<u8> = (0..n)
            .map(|x| (self.parity[x / nb] + other.parity[x % nb]) % 2)
            .collect();
        let degree = match (&self.degree, &other.degree) {
            (Some(d1), Some(d2)) => Some((0..n).map(|x| d1[x / nb] + d2[x % nb]).collect()),
            _ => None,
        };
        let names = (0..n)
            .map(|x| format!("{}⊗{}", self.names[x / nb], other.names[x % nb]))
            .collect();
        let mut mult = vec![ZERO; n * n * n];
        for i in 0..na {
            for j in 0..na {
                for k in 0..na {
                    let mij = self.m(i, j, k);
                    if mij == ZERO {
                        continue;
                    }
                    for a in 0..nb {
                        let s = sign((other.parity[a] * self.parity[j]) as usize);
                        for b in 0..nb {
                            for cc in 0..nb {
                                let mab = other.m(a, b, cc);
                                if mab == ZERO {
                                    continue;
                                }
                                mult[(idx(i, a) * n + idx(j, b)) * n + idx(k, cc)] +=
                                    mij * mab * s;
                            }
                        }
                    }
                }
            }
        }
        let trace = (0..n)
            .map(|x| {
                let (i, a) = (x / nb, x % nb);
                self.trace[i] * other.trace[a] * sign((other.p * self.parity[i]) as usize)
            })
            .collect();
        let id_b = Mat::identity(nb, nb);
        let id_a = Mat::identity(na, na);
        let q = kron(&self.q, &id_b) + kron(&(self.parity_diag() * id_a), &other.q);
        let star = match (&self.star, &other.star) {
            (Some(s1), Some(s2)) => {
                let mut s = kron(s1, s2);
                for x in 0..n {
                    let (ea, fb) = (self.parity[x / nb] as usize, other.parity[x % nb] as usize);
                    let pa = self.p as usize;
                    let ph = sign(ea * fb + pa * fb + pa * other.p as usize);
                    for r in 0..n {
                        s[(r, x)] *= ph;
                    }
                }
                Some(s)
            }
            _ => None,
        };
        CyAlgebra {
            names,
            parity,
            degree,
            mult,
            trace,
            q,
            p: (self.p + other.p) % 2,
            star,
        }
    }

    /// `Mat_N(A) = A ⊗ Mat_N`.
    pub fn matrix_amplify(&self, n: usize) -> CyAlgebra {
        assert!(n >= 1, "matrix size must be positive");
        self.tensor(&builtins::matrix_algebra(n))
    }

    /// The same algebra written in the basis `e'_j = sum_i P[i][j] e_i`.
    ///
    /// `P` must be invertible and must not mix parities.
    pub fn transport(&self, pmat: &Mat) -> Result<CyAlgebra, AlgebraError> {
        let n = self.dim();
        if pmat.nrows() != n || pmat.ncols() != n {
            return Err(AlgebraError::BadBasisChange);
        }
        for i in 0..n {
            for j in 0..n {
                if self.parity[i] != self.parity[j] && pmat[(i, j)].norm() > 0.0 {
                    return Err(AlgebraError::BadBasisChange);
                }
            }
        }
        let pinv = pmat
            .clone()
            .try_inverse()
            .ok_or(AlgebraError::BadBasisChange)?;
        // m'_{ij} as a vector: P^{-1} (P e_i)(P e_j)
        let mut mult = vec![ZERO; n * n * n];
        let cols: Vec<Vector> = (0..n).map(|j| pmat.column(j).into_owned()).collect();
        for i in 0..n {
            let li = self.left_mul_by(&cols[i]);
            for j in 0..n {
                let v = &pinv * (&li * &cols[j]);
                for k in 0..n {
                    mult[(i * n + j) * n + k] = v[k];
                }
            }
        }
        let tr = Vector::from_column_slice(&self.trace);
        let trace: Vec<C64> = (pmat.transpose() * tr).iter().cloned().collect();
        let q = &pinv * &self.q * pmat;
        let star = self
            .star
            .as_ref()
            .map(|s| &pinv * s * pmat.map(|z| z.conj()));
        Ok(CyAlgebra {
            names: (0..n).map(|i| format!("e{i}'")).collect(),
            parity: self.parity.clone(),
            degree: self.degree.clone(),
            mult,
            trace,
            q,
            p: self.p,
            star,
        })
    }
}

pub mod builtins {
    //! Named example algebras, all with compatible Hodge stars.

    use super::*;

    /// `C[x]/(x^4)` with `|x| = 1`, `Qx = -x^2`, `Tr x^3 = 1`, `p = 1`.
    pub fn toy() -> CyAlgebra {
        let n = 4;
        let mut mult = vec![ZERO; n * n * n];
        for i in 0..n {
            for j in 0..n {
                if i + j < n {
                    mult[(i * n + j) * n + i + j] = ONE;
                }
            }
        }
        let mut q = Mat::zeros(n, n);
        q[(2, 1)] = c(-1.0);
        let mut star = Mat::zeros(n, n);
        for i in 0..n {
            star[(3 - i, i)] = ONE;
        }
        CyAlgebra {
            names: vec!["1".into(), "x".into(), "x2".into(), "x3".into()],
            parity: vec![0, 1, 0, 1],
            degree: Some(vec![0, 1, 2, 3]),
            mult,
            trace: vec![ZERO, ZERO, ZERO, ONE],
            q,
            p: 1,
            star: Some(star),
        }
    }

    /// Exterior algebra on `t1, t2` with `Q t2 = 1`, `Tr(t1 t2) = 1`, `p = 0`.
    pub fn lambda() -> CyAlgebra {
        let n = 4;
        let mut mult = vec![ZERO; n * n * n];
        let mut put = |i: usize, j: usize, k: usize, v: f64| mult[(i * n + j) * n + k] = c(v);
        for i in 0..n {
            put(0, i, i, 1.0);
            put(i, 0, i, 1.0);
        }
        put(1, 2, 3, 1.0);
        put(2, 1, 3, -1.0);
        let mut q = Mat::zeros(n, n);
        q[(0, 2)] = ONE;
        q[(1, 3)] = c(-1.0);
        let mut star = Mat::zeros(n, n);
        star[(3, 0)] = ONE;
        star[(0, 3)] = ONE;
        star[(2, 1)] = ONE;
        star[(1, 2)] = c(-1.0);
        CyAlgebra {
            names: vec!["1".into(), "t1".into(), "t2".into(), "t1t2".into()],
            parity: vec![0, 1, 1, 0],
            degree: None,
            mult,
            trace: vec![ZERO, ZERO, ZERO, ONE],
            q,
            p: 0,
            star: Some(star),
        }
    }

    /// The complex numbers with `Q = 0`, `Tr 1 = 1`.
    pub fn point() -> CyAlgebra {
        CyAlgebra {
            names: vec!["1".into()],
            parity: vec![0],
            degree: Some(vec![0]),
            mult: vec![ONE],
            trace: vec![ONE],
            q: Mat::zeros(1, 1),
            p: 0,
            star: Some(Mat::identity(1, 1)),
        }
    }

    /// `C[t]` with `t` odd, `Tr t = 1`, `Q = 0`, `p = 1`.
    pub fn grassmann() -> CyAlgebra {
        let n = 2;
        let mut mult = vec![ZERO; n * n * n];
        let at = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        mult[at(0, 0, 0)] = ONE;
        mult[at(0, 1, 1)] = ONE;
        mult[at(1, 0, 1)] = ONE;
        let mut star = Mat::zeros(n, n);
        star[(0, 1)] = ONE;
        star[(1, 0)] = ONE;
        CyAlgebra {
            names: vec!["1".into(), "t".into()],
            parity: vec![0, 1],
            degree: None,
            mult,
            trace: vec![ZERO, ONE],
            q: Mat::zeros(n, n),
            p: 1,
            star: Some(star),
        }
    }

    /// Matrix units `E_ij` (index `i*N + j`) with the matrix trace and `*E_ij = E_ji`.
    pub fn matrix_algebra(size: usize) -> CyAlgebra {
        let n = size * size;
        let mut mult = vec![ZERO; n * n * n];
        for i in 0..size {
            for j in 0..size {
                for k in 0..size {
                    mult[((i * size + j) * n + j * size + k) * n + i * size + k] = ONE;
                }
            }
        }
        let trace = (0..n)
            .map(|x| if x / size == x % size { ONE } else { ZERO })
            .collect();
        let mut star = Mat::zeros(n, n);
        for i in 0..size {
            for j in 0..size {
                star[(j * size + i, i * size + j)] = ONE;
            }
        }
        CyAlgebra {
            names: (0..n).map(|x| format!("E{}{}", x / size, x % size)).collect(),
            parity: vec![0; n],
            degree: Some(vec![0; n]),
            mult,
            trace,
            q: Mat::zeros(n, n),
            p: 0,
            star: Some(star),
        }
    }

    /// `Mat_2 ⊗ C[t]` with the inner differential `Qa = Xa - (-1)^{|a|} aX`, `X = E_01⊗t`.
    ///
    /// Four of its eight eigenvalues of `H` vanish, so it has a nontrivial
    /// harmonic subspace together with nonzero propagators.
    pub fn matrix_grassmann() -> CyAlgebra {
        let a = matrix_algebra(2).tensor(&grassmann());
        let n = a.dim();
        let mut x = Vector::zeros(n);
        // second matrix unit tensored with t
        x[3] = ONE;
        let mut q = Mat::zeros(n, n);
        for col in 0..n {
            let e = crate::linalg::basis_vector(n, col);
            let v = a.multiply(&x, &e) - a.multiply(&e, &x) * c(sign(a.parity[col] as usize));
            q.set_column(col, &v);
        }
        a.with_q(q)
    }

    pub const NAMES: &[&str] = &[
        "toy",
        "lambda",
        "point",
        "grassmann",
        "mat2",
        "matrix-grassmann",
        "toy-lambda",
        "lambda-toy",
        "toy-toy",
        "toy-mat2",
    ];

    pub fn by_name(name: &str) -> Result<CyAlgebra, AlgebraError> {
        Ok(match name {
            "toy" => toy(),
            "lambda" => lambda(),
            "point" => point(),
            "grassmann" => grassmann(),
            "mat2" => matrix_algebra(2),
            "matrix-grassmann" => matrix_grassmann(),
            "toy-lambda" => toy().tensor(&lambda()),
            "lambda-toy" => lambda().tensor(&toy()),
            "toy-toy" => toy().tensor(&toy()),
            "toy-mat2" => toy().matrix_amplify(2),
            other => return Err(AlgebraError::UnknownBuiltin(other.to_string())),
        })
    }

    pub fn all() -> Vec<(&'static str, CyAlgebra)> {
        NAMES.iter().map(|n| (*n, by_name(n).unwrap())).collect()
    }
}

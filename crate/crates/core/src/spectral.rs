//! Hermitian structure, Hodge decomposition and exact heat kernels.
//!
//! The metric is `<a,b> = Tr(a * b)`; in coordinates `<a,b> = b^H M a` with
//! `M = (B S)^T`, where `B` is the pairing matrix and `S` the star.
//! Kernels are elements of `A ⊗ A` stored as coefficient matrices `k[i][j]`
//! on `e_i ⊗ e_j`. A kernel acts on `f` by
//! `(kf)(x) = (-1)^{p|f|} Tr_y k(x,y) f(y)`, which in coordinates is the
//! matrix `k B D_p` with `D_p = diag((-1)^{p|e_i|})`.

use crate::algebra::{CyAlgebra, Residual};
use crate::linalg::{c, column_space, max_abs, rank, sign, Mat, Vector, C64};
use serde::Serialize;
use thiserror::Error;

/// Eigenvalues of `H` below this are treated as zero.
pub const HARMONIC_CUTOFF: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("algebra has no Hodge star")]
    MissingStar,
    #[error("Tr(a*b) is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("Tr(a*b) is not positive definite: eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("star does not square to the graded sign (residual {0:e})")]
    StarSquare(f64),
    #[error("trace pairing is degenerate (rank {rank} < {dim})")]
    DegeneratePairing { rank: usize, dim: usize },
    #[error("heat kernel time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("regularisation parameter must be nonnegative, got {0}")]
    NegativeEpsilon(f64),
}

/// A heat-kernel time: positive and finite, or infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Time {
    Finite(f64),
    Infinite,
}

impl Time {
    pub fn finite(t: f64) -> Result<Time, SpectralError> {
        if t > 0.0 && t.is_finite() {
            Ok(Time::Finite(t))
        } else if t == f64::INFINITY {
            Ok(Time::Infinite)
        } else {
            Err(SpectralError::NonPositiveTime(t))
        }
    }
}

/// A kernel in `A ⊗ A` with its parity.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2 {
    pub coeffs: Mat,
    pub parity: u8,
}

#[derive(Debug, Clone)]
pub struct Spectral {
    alg: CyAlgebra,
    gram: Mat,
    qdag: Mat,
    ham: Mat,
    eigenvalues: Vec<f64>,
    vecs: Mat,
    vecs_inv: Mat,
    pairing: Mat,
    pairing_inv: Mat,
    im_q: Mat,
    ker_h: Mat,
    im_qdag: Mat,
    traces: std::sync::Arc<crate::forms::TraceTensors>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub dim_im_q: usize,
    pub dim_ker_h: usize,
    pub dim_im_qdag: usize,
    pub identity_residuals: Vec<(f64, Vec<Residual>)>,
    pub hodge_residuals: Vec<Residual>,
}

impl Spectral {
    pub fn new(alg: &CyAlgebra) -> Result<Self, SpectralError> {
        let n = alg.dim();
        let star = alg.star().ok_or(SpectralError::MissingStar)?;
        let pairing = alg.pairing_matrix();
        let r = rank(&pairing, 1e-10);
        if r < n {
            return Err(SpectralError::DegeneratePairing { rank: r, dim: n });
        }
        let pairing_inv = pairing.clone().try_inverse().expect("nondegenerate pairing");
        let gram = (&pairing * star).transpose();
        let herm = max_abs(&(&gram - gram.adjoint()));
        if herm > 1e-10 {
            return Err(SpectralError::NotHermitian(herm));
        }
        let gram = (&gram + gram.adjoint()) * c(0.5);
        let min_eig = gram
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig <= 1e-12 {
            return Err(SpectralError::NotPositive(min_eig));
        }
        let p = alg.p() as usize;
        let want = Mat::from_diagonal(&Vector::from_iterator(
            n,
            alg.parity().iter().map(|&x| c(sign(x as usize * (p + 1)))),
        ));
        let ss = max_abs(&(star * star.map(|z| z.conj()) - want));
        if ss > 1e-10 {
            return Err(SpectralError::StarSquare(ss));
        }

        let q = alg.q();
        let gram_inv = gram.clone().try_inverse().expect("positive definite");
        let qdag = &gram_inv * q.adjoint() * &gram;
        let ham = q * &qdag + &qdag * q;

        // orthonormal coordinates y = L^H a where M = L L^H
        let chol = gram.clone().cholesky().expect("positive definite");
        let l = chol.l();
        let lh = l.adjoint();
        let lh_inv = lh.clone().try_inverse().expect("invertible factor");
        let ht = &lh * &ham * &lh_inv;
        let ht = (&ht + ht.adjoint()) * c(0.5);
        let eig = ht.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let mut u = Mat::zeros(n, n);
        let mut eigenvalues = Vec::with_capacity(n);
        for (col, &i) in order.iter().enumerate() {
            u.set_column(col, &eig.eigenvectors.column(i));
            let lam = eig.eigenvalues[i];
            eigenvalues.push(if lam.abs() < HARMONIC_CUTOFF { 0.0 } else { lam });
        }
        let vecs = &lh_inv * &u;
        let vecs_inv = u.adjoint() * &lh;

        let harmonic: Vec<usize> = (0..n).filter(|&i| eigenvalues[i] == 0.0).collect();
        let mut ker_h = Mat::zeros(n, harmonic.len());
        for (col, &i) in harmonic.iter().enumerate() {
            ker_h.set_column(col, &vecs.column(i));
        }
        let im_q = orthonormalize(&gram, &column_space(q, 1e-10));
        let im_qdag = orthonormalize(&gram, &column_space(&qdag, 1e-10));
        Ok(Spectral {
            alg: alg.clone(),
            gram,
            qdag,
            ham,
            eigenvalues,
            vecs,
            vecs_inv,
            pairing,
            pairing_inv,
            im_q,
            ker_h,
            im_qdag,
            traces: Default::default(),
        })
    }

    /// Cached trace tensors shared by every form evaluated over this algebra.
    pub fn traces(&self) -> &crate::forms::TraceTensors {
        &self.traces
    }

    pub fn algebra(&self) -> &CyAlgebra {
        &self.alg
    }
    pub fn dim(&self) -> usize {
        self.alg.dim()
    }
    pub fn p(&self) -> u8 {
        self.alg.p()
    }
    /// `M` with `<a,b> = b^H M a`.
    pub fn gram(&self) -> &Mat {
        &self.gram
    }
    pub fn qdag(&self) -> &Mat {
        &self.qdag
    }
    pub fn hamiltonian(&self) -> &Mat {
        &self.ham
    }
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
    /// Eigenvectors of `H` as columns, orthonormal for `<,>`.
    pub fn eigenvectors(&self) -> &Mat {
        &self.vecs
    }
    pub fn pairing(&self) -> &Mat {
        &self.pairing
    }
    pub fn pairing_inv(&self) -> &Mat {
        &self.pairing_inv
    }
    pub fn im_q(&self) -> &Mat {
        &self.im_q
    }
    /// Orthonormal basis of harmonic elements.
    pub fn ker_h(&self) -> &Mat {
        &self.ker_h
    }
    pub fn im_qdag(&self) -> &Mat {
        &self.im_qdag
    }

    pub fn inner(&self, a: &Vector, b: &Vector) -> C64 {
        (b.adjoint() * &self.gram * a)[(0, 0)]
    }

    /// `g(H)` through the eigendecomposition.
    pub fn function_of_h(&self, g: impl Fn(f64) -> f64) -> Mat {
        let n = self.dim();
        let d = Vector::from_iterator(n, self.eigenvalues.iter().map(|&l| c(g(l))));
        &self.vecs * Mat::from_diagonal(&d) * &self.vecs_inv
    }

    pub fn heat_operator(&self, t: Time) -> Mat {
        match t {
            Time::Finite(t) => self.function_of_h(|l| (-t * l).exp()),
            Time::Infinite => self.harmonic_projector(),
        }
    }

    /// `d/dt e^{-tH} = -H e^{-tH}`.
    pub fn heat_derivative(&self, t: f64) -> Mat {
        self.function_of_h(|l| -l * (-t * l).exp())
    }

    pub fn harmonic_projector(&self) -> Mat {
        self.function_of_h(|l| if l == 0.0 { 1.0 } else { 0.0 })
    }

    pub fn kernel_of_operator(&self, t: &Mat) -> Mat {
        t * self.alg.p_diag() * &self.pairing_inv
    }

    pub fn convolution_operator(&self, k: &Mat) -> Mat {
        k * &self.pairing * self.alg.p_diag()
    }

    pub fn delta_kernel(&self) -> Kernel2 {
        Kernel2 {
            coeffs: self.kernel_of_operator(&Mat::identity(self.dim(), self.dim())),
            parity: self.p(),
        }
    }

    pub fn heat_kernel(&self, t: Time) -> Kernel2 {
        Kernel2 {
            coeffs: self.kernel_of_operator(&self.heat_operator(t)),
            parity: self.p(),
        }
    }

    /// `L_t = -Q†` applied in the first slot of `K_t`.
    pub fn l_kernel(&self, t: Time) -> Kernel2 {
        let k = self.heat_kernel(t).coeffs;
        Kernel2 {
            coeffs: -(&self.qdag * k),
            parity: (self.p() + 1) % 2,
        }
    }

    /// First-slot action `X_x k`.
    pub fn act_first(&self, x: &Mat, k: &Mat) -> Mat {
        x * k
    }

    /// Second-slot action `X_y k` for an operator of parity `odd`.
    pub fn act_second(&self, x: &Mat, k: &Mat, odd: bool) -> Mat {
        if odd {
            self.alg.parity_diag() * k * x.transpose()
        } else {
            k * x.transpose()
        }
    }

    /// `k(x,y) -> k(y,x)` with the Koszul sign.
    pub fn swap(&self, k: &Mat) -> Mat {
        let par = self.alg.parity();
        Mat::from_fn(k.nrows(), k.ncols(), |j, i| {
            k[(i, j)] * sign((par[i] * par[j]) as usize)
        })
    }

    /// Residuals of the six heat-kernel identities at time `t`, plus a
    /// central-difference check of the time derivative.
    pub fn identity_suite(&self, t: f64) -> Result<Vec<Residual>, SpectralError> {
        let tt = Time::finite(t)?;
        let q = self.alg.q();
        let k = self.heat_kernel(tt).coeffs;
        let l = self.l_kernel(tt).coeffs;
        let ps = sign(self.p() as usize);
        let dk = self.kernel_of_operator(&self.heat_derivative(t));
        let tol = IDENTITY_TOL;
        let r1 = max_abs(&(self.act_first(q, &k) + self.act_second(q, &k, true)));
        let r2 = max_abs(&(self.act_first(&self.qdag, &k) - self.act_second(&self.qdag, &k, true)));
        let r3 = max_abs(&(self.act_first(&self.ham, &k) - self.act_second(&self.ham, &k, false)));
        let r4 = max_abs(&(&k - self.swap(&k) * c(ps)));
        let r5 = max_abs(&(&l - self.swap(&l) * c(ps)));
        let ql = self.act_first(q, &l) + self.act_second(q, &l, true);
        let hk = -self.act_first(&self.ham, &k);
        let r6 = max_abs(&(&ql - &hk)).max(max_abs(&(&hk - &dk)));
        let h = 1e-5;
        let fd = (self.heat_kernel(Time::Finite(t + h)).coeffs
            - self.heat_kernel(Time::Finite(t - h)).coeffs)
            * c(0.5 / h);
        let r7 = max_abs(&(fd - &dk));
        Ok(vec![
            Residual::new("QxK+QyK=0", r1, tol),
            Residual::new("Q†xK=Q†yK", r2, tol),
            Residual::new("HxK=HyK", r3, tol),
            Residual::new("K symmetric", r4, tol),
            Residual::new("L symmetric", r5, tol),
            Residual::new("(Qx+Qy)L=-HxK=dK/dt", r6, tol),
            Residual::new("dK/dt finite difference", r7, 1e-7),
        ])
    }

    /// Green's operator `G_eps`, homotopy `h_eps = -Q† G_eps` and the
    /// propagator `P_eps = -∫_eps^∞ L_t dt`, which is the kernel of `Q† G_eps`.
    pub fn green_homotopy(&self, eps: f64) -> Result<(Mat, Mat, Mat), SpectralError> {
        if !(eps >= 0.0) {
            return Err(SpectralError::NegativeEpsilon(eps));
        }
        let g = self.function_of_h(|l| if l == 0.0 { 0.0 } else { (-eps * l).exp() / l });
        let h = -(&self.qdag * &g);
        let pk = self.kernel_of_operator(&(-&h));
        Ok((g, h, pk))
    }

    /// Checks of the Hodge decomposition, each a named residual.
    pub fn hodge_residuals(&self) -> Vec<Residual> {
        let n = self.dim();
        let tol = IDENTITY_TOL;
        let q = self.alg.q();
        let dims = self.im_q.ncols() + self.ker_h.ncols() + self.im_qdag.ncols();
        let mut out = vec![Residual::new(
            "dim ImQ + dim KerH + dim ImQ† - dim A",
            (dims as f64 - n as f64).abs(),
            0.0,
        )];
        let kq = max_abs(&(q * &self.ker_h)).max(max_abs(&(&self.qdag * &self.ker_h)));
        out.push(Residual::new("KerH in KerQ∩KerQ†", kq, tol));
        // dim(KerQ ∩ KerQ†) = n - rank([Q; Q†])
        let mut stacked = Mat::zeros(2 * n, n);
        stacked.view_mut((0, 0), (n, n)).copy_from(q);
        stacked.view_mut((n, 0), (n, n)).copy_from(&self.qdag);
        let kdim = n - rank(&stacked, 1e-10);
        out.push(Residual::new(
            "dim KerQ∩KerQ† - dim KerH",
            (kdim as f64 - self.ker_h.ncols() as f64).abs(),
            0.0,
        ));
        let iso = |m: &Mat| max_abs(&(m.transpose() * &self.pairing * m));
        out.push(Residual::new("ImQ isotropic", iso(&self.im_q), tol));
        out.push(Residual::new("ImQ† isotropic", iso(&self.im_qdag), tol));
        let (_, h0, _) = self.green_homotopy(0.0).expect("eps = 0");
        let id = Mat::identity(n, n);
        let hom = q * &h0 + &h0 * q + (id - self.harmonic_projector());
        out.push(Residual::new("Qh+hQ=π-Id", max_abs(&hom), tol));
        // Tr((Q†e_i) e_j) = (-1)^{|i|} Tr(e_i (Q†e_j))
        let lhs = self.qdag.transpose() * &self.pairing;
        let rhs = self.alg.parity_diag() * &self.pairing * &self.qdag;
        out.push(Residual::new("Q† self-adjoint for Tr(ab)", max_abs(&(lhs - rhs)), tol));
        let lhs = self.ham.transpose() * &self.pairing;
        let rhs = &self.pairing * &self.ham;
        out.push(Residual::new("H self-adjoint for Tr(ab)", max_abs(&(lhs - rhs)), tol));
        out
    }

    pub fn report(&self, times: &[f64]) -> SpectralReport {
        SpectralReport {
            eigenvalues: self.eigenvalues.clone(),
            dim_im_q: self.im_q.ncols(),
            dim_ker_h: self.ker_h.ncols(),
            dim_im_qdag: self.im_qdag.ncols(),
            identity_residuals: times
                .iter()
                .map(|&t| (t, self.identity_suite(t).unwrap_or_default()))
                .collect(),
            hodge_residuals: self.hodge_residuals(),
        }
    }
}

/// Gram-Schmidt in the metric `M`, dropping dependent columns.
fn orthonormalize(gram: &Mat, cols: &Mat) -> Mat {
    let n = cols.nrows();
    let mut out: Vec<Vector> = Vec::new();
    for j in 0..cols.ncols() {
        let mut v = cols.column(j).into_owned();
        for u in &out {
            let proj = (u.adjoint() * gram * &v)[(0, 0)];
            v -= u * proj;
        }
        let nrm = (v.adjoint() * gram * &v)[(0, 0)].re.sqrt();
        if nrm > 1e-10 {
            out.push(v / c(nrm));
        }
    }
    let mut m = Mat::zeros(n, out.len());
    for (j, v) in out.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

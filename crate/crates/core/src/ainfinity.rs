//! Minimal cyclic A∞ structure on harmonic elements by homological
//! perturbation, and the same products as integrals of tree forms.
//!
//! Products are assembled in the suspended convention, where every map is
//! odd and only Koszul signs appear: `b_1 = -Q`, `b_2(sa, sb) = (-1)^{|a|} s(ab)`,
//! homotopy `K = -h` with `b_1 K + K b_1 = π - 1`. The transferred products are
//! `b'_n = π λ_n`, `λ_n = Σ b_2(K λ_k ⊗ K λ_{n-k})` with bare leaves.

use crate::forms::{FormContext, FormError, Tensor};
use crate::linalg::{c, sign, Mat, Vector, C64, ZERO};
use crate::partition::{harmonic_basis, orientation_sign, PartitionError};
use crate::ribbon::{GraphError, Length, RibbonGraph};
use crate::spectral::{Spectral, SpectralError};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AInfinityError {
    #[error("arity must be at least 2, got {0}")]
    Arity(usize),
    #[error("arity {0} exceeds the computed range")]
    NotComputed(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Planar binary tree whose leaves are numbered left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Leaf(usize),
    Node(Box<Tree>, Box<Tree>),
}

impl Tree {
    /// All planar binary trees with `n` leaves.
    pub fn all(n: usize) -> Vec<Tree> {
        fn span(lo: usize, hi: usize) -> Vec<Tree> {
            if hi - lo == 1 {
                return vec![Tree::Leaf(lo)];
            }
            let mut out = Vec::new();
            for mid in lo + 1..hi {
                for l in span(lo, mid) {
                    for r in span(mid, hi) {
                        out.push(Tree::Node(Box::new(l.clone()), Box::new(r)));
                    }
                }
            }
            out
        }
        if n == 0 {
            return vec![];
        }
        span(0, n)
    }

    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Ribbon graph with one incoming vertex per leaf and an outgoing root.
    /// Internal vertices are ordered `(left, right, parent)`.
    pub fn to_graph(&self) -> Result<RibbonGraph, GraphError> {
        struct Builder {
            edges: Vec<[usize; 2]>,
            vertices: Vec<Vec<usize>>,
            leaves: Vec<(usize, usize)>,
            next: usize,
        }
        impl Builder {
            fn dart(&mut self) -> usize {
                self.next += 1;
                self.next - 1
            }
            fn go(&mut self, t: &Tree) -> usize {
                match t {
                    Tree::Leaf(i) => {
                        let d = self.dart();
                        self.leaves.push((*i, self.vertices.len()));
                        self.vertices.push(vec![d]);
                        d
                    }
                    Tree::Node(l, r) => {
                        let dl = self.go(l);
                        let dr = self.go(r);
                        let (a, b, c) = (self.dart(), self.dart(), self.dart());
                        self.edges.push([dl, a]);
                        self.edges.push([dr, b]);
                        self.vertices.push(vec![a, b, c]);
                        c
                    }
                }
            }
        }
        let mut b = Builder {
            edges: vec![],
            vertices: vec![],
            leaves: vec![],
            next: 0,
        };
        let top = b.go(self);
        let o = b.dart();
        b.edges.push([top, o]);
        let out = b.vertices.len();
        b.vertices.push(vec![o]);
        b.leaves.sort();
        let incoming = b.leaves.iter().map(|&(_, v)| v).collect();
        RibbonGraph::new(b.edges, b.vertices, incoming, vec![out])
    }
}

/// Products `m_n` on a parity-homogeneous harmonic basis, `2 ≤ n ≤ n_max`.
#[derive(Debug, Clone)]
pub struct CyclicAInfinity {
    pub basis: Vec<Vector>,
    /// Parity of each basis element before suspension.
    pub parity: Vec<u8>,
    /// `b[n]`: flat array over input words (first input slowest) of output
    /// coordinates, suspended convention.
    b: Vec<Vec<C64>>,
    p: u8,
    pairing: Mat,
}

fn word(mut ix: usize, k: usize, n: usize) -> Vec<usize> {
    let mut w = vec![0; n];
    for j in (0..n).rev() {
        w[j] = ix % k;
        ix /= k;
    }
    w
}

/// Least-squares coordinates of harmonic vectors in the basis.
fn coordinates(basis: &Mat) -> Mat {
    if basis.ncols() == 0 {
        return Mat::zeros(0, basis.nrows());
    }
    basis.clone().pseudo_inverse(1e-12).expect("pseudo-inverse")
}

impl CyclicAInfinity {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
    pub fn n_max(&self) -> usize {
        self.b.len() - 1
    }

    /// Suspended parity of basis element `i`.
    fn sp(&self, i: usize) -> usize {
        (self.parity[i] as usize + 1) % 2
    }

    fn b_entry(&self, n: usize, w: &[usize]) -> &[C64] {
        let k = self.rank();
        let ix = w.iter().fold(0, |acc, &x| acc * k + x);
        &self.b[n][ix * k..(ix + 1) * k]
    }

    /// `m_n` as a flat array: entry `(word, j)` is the `j`-th coordinate of
    /// `m_n(e_{w_1}, .., e_{w_n})`.
    pub fn m(&self, n: usize) -> Result<Vec<C64>, AInfinityError> {
        if n < 2 {
            return Err(AInfinityError::Arity(n));
        }
        if n > self.n_max() {
            return Err(AInfinityError::NotComputed(n));
        }
        let k = self.rank();
        let mut out = self.b[n].clone();
        for ix in 0..k.pow(n as u32) {
            let w = word(ix, k, n);
            let odd: usize = w.iter().enumerate().map(|(j, &x)| (n - 1 - j) * self.parity[x] as usize).sum();
            if odd % 2 == 1 {
                out[ix * k..(ix + 1) * k].iter_mut().for_each(|z| *z = -*z);
            }
        }
        Ok(out)
    }

    /// Max-norm of `Σ b'_{r+1+t}(1^r ⊗ b'_s ⊗ 1^t)` over all input words of length `n`.
    pub fn relation_residual(&self, n: usize) -> Result<f64, AInfinityError> {
        if n < 3 || n > self.n_max() + 1 {
            return Err(AInfinityError::NotComputed(n));
        }
        let k = self.rank();
        let mut worst: f64 = 0.0;
        let mut acc = vec![ZERO; k];
        for ix in 0..k.pow(n as u32) {
            let w = word(ix, k, n);
            acc.iter_mut().for_each(|z| *z = ZERO);
            for s in 2..n {
                for r in 0..=n - s {
                    let before: usize = w[..r].iter().map(|&x| self.sp(x)).sum();
                    let inner = self.b_entry(s, &w[r..r + s]);
                    let outer_n = n - s + 1;
                    for (j, &z) in inner.iter().enumerate() {
                        if z == ZERO {
                            continue;
                        }
                        let mut w2 = w[..r].to_vec();
                        w2.push(j);
                        w2.extend_from_slice(&w[r + s..]);
                        let coef = z * sign(before);
                        for (o, &y) in self.b_entry(outer_n, &w2).iter().enumerate() {
                            acc[o] += coef * y;
                        }
                    }
                }
            }
            worst = acc.iter().fold(worst, |m, z| m.max(z.norm()));
        }
        Ok(worst)
    }

    /// `ω(sa, sb) = (-1)^{(p+1)|a|} Tr(ab)` on basis elements.
    fn omega(&self, i: usize, j: usize) -> C64 {
        self.pairing[(i, j)] * sign((self.p as usize + 1) * self.parity[i] as usize)
    }

    /// Max-norm deviation of `ω(b'_n(x_1..x_n), x_0)` from cyclic symmetry
    /// under `(x_0..x_n) -> (x_n, x_0..x_{n-1})` with the Koszul sign.
    pub fn cyclicity_residual(&self, n: usize) -> Result<f64, AInfinityError> {
        if n < 2 || n > self.n_max() {
            return Err(AInfinityError::NotComputed(n));
        }
        let k = self.rank();
        let cyc = |x0: usize, rest: &[usize]| -> C64 {
            self.b_entry(n, rest)
                .iter()
                .enumerate()
                .map(|(j, &z)| z * self.omega(j, x0))
                .sum()
        };
        let mut worst: f64 = 0.0;
        for ix in 0..k.pow(n as u32 + 1) {
            let w = word(ix, k, n + 1);
            let lhs = cyc(w[0], &w[1..]);
            let rot: Vec<usize> = std::iter::once(w[n]).chain(w[..n].iter().cloned()).collect();
            let moved: usize = w[..n].iter().map(|&x| self.sp(x)).sum::<usize>() * self.sp(w[n]);
            let rhs = cyc(rot[0], &rot[1..]) * sign(moved);
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(worst)
    }
}

/// Transferred products `m_2 .. m_{n_max}` by the tree formula.
pub fn hpl_products(spec: &Spectral, n_max: usize) -> Result<CyclicAInfinity, AInfinityError> {
    hpl_products_in(spec, harmonic_basis(spec), n_max)
}

/// As [`hpl_products`] on a given parity-homogeneous harmonic basis.
pub fn hpl_products_in(spec: &Spectral, basis: Vec<(Vector, u8)>, n_max: usize) -> Result<CyclicAInfinity, AInfinityError> {
    if n_max < 2 {
        return Err(AInfinityError::Arity(n_max));
    }
    let alg = spec.algebra();
    let dim = alg.dim();
    let k = basis.len();
    let (_, h, _) = spec.green_homotopy(0.0)?;
    let kmat = -h;
    let pi = spec.harmonic_projector();
    let bmat = Mat::from_fn(dim, k, |r, c| basis[c].0[r]);
    let coords = coordinates(&bmat);
    // b_2(u, v) for vectors with homogeneous suspended parity given by `pu`
    let b2 = |u: &Vector, pu_unsusp: u8, v: &Vector| -> Vector { alg.multiply(u, v) * c(sign(pu_unsusp as usize)) };
    let leaf_parity: Vec<usize> = basis.iter().map(|(_, q)| *q as usize).collect();
    // K is odd and b_2 even before suspension: |K λ_n(w)| = Σ|w_i| + n - 1
    let parity_of = |len: usize, ix: usize| -> u8 {
        let sum: usize = word(ix, k, len).iter().map(|&x| leaf_parity[x]).sum();
        ((sum + len - 1) % 2) as u8
    };
    // kl[len][word index] = K λ_len(word) as a vector in A (bare for len 1)
    let mut kl: Vec<Vec<Vector>> = vec![vec![]; n_max + 1];
    let mut lam: Vec<Vec<Vector>> = vec![vec![]; n_max + 1];
    kl[1] = basis.iter().map(|(v, _)| v.clone()).collect();
    for n in 2..=n_max {
        let total = k.pow(n as u32);
        let mut lam_n = Vec::with_capacity(total);
        for ix in 0..total {
            let mut acc = Vector::zeros(dim);
            for split in 1..n {
                let right_size = k.pow((n - split) as u32);
                let (li, ri) = (ix / right_size, ix % right_size);
                let u = &kl[split][li];
                let v = &kl[n - split][ri];
                // all K λ are even in the suspended grading: no Koszul sign
                acc += b2(u, parity_of(split, li), v);
            }
            lam_n.push(acc);
        }
        kl[n] = lam_n.iter().map(|v| &kmat * v).collect();
        lam[n] = lam_n;
    }
    let mut b = vec![vec![]; n_max + 1];
    for n in 2..=n_max {
        let mut flat = Vec::with_capacity(lam[n].len() * k);
        for v in &lam[n] {
            let cv = &coords * (&pi * v);
            flat.extend(cv.iter().cloned());
        }
        b[n] = flat;
    }
    let pairing = Mat::from_fn(k, k, |i, j| alg.pairing(&basis[i].0, &basis[j].0));
    Ok(CyclicAInfinity {
        parity: basis.iter().map(|(_, q)| *q).collect(),
        basis: basis.into_iter().map(|(v, _)| v).collect(),
        b,
        p: alg.p(),
        pairing,
    })
}

/// Sign relating tree-form products to `m_n`: the toy orientation of the
/// space of metric trees differs from the suspended tree formula by
/// `(-1)^{(n-2)(n-3)/2}`.
pub fn tree_form_sign(n: usize) -> f64 {
    let k = n.saturating_sub(2);
    sign(k * k.saturating_sub(1) / 2)
}

/// `m_n` a second way: every planar binary tree, internal lengths integrated
/// over `[0, ∞)`, external edges infinitely long, each tree oriented by the
/// toy calibration, times [`tree_form_sign`]. Same layout as
/// [`CyclicAInfinity::m`].
pub fn tree_form_products(spec: &Spectral, a: &CyclicAInfinity, n: usize) -> Result<Vec<C64>, AInfinityError> {
    if n < 2 {
        return Err(AInfinityError::Arity(n));
    }
    let dim = spec.dim();
    let k = a.rank();
    let bmat = Mat::from_fn(dim, k, |r, c| a.basis[c][r]);
    let coords = coordinates(&bmat);
    let words = k.pow(n as u32);
    let mut out = vec![ZERO; words * k];
    for tree in Tree::all(n) {
        let g = tree.to_graph()?;
        let triv = g.default_trivialization();
        let orient = orientation_sign(&g, &triv)? as f64 * tree_form_sign(n);
        let ctx = FormContext::new(spec, g.clone(), triv)?;
        let lengths: Vec<Length> = (0..g.num_edges())
            .map(|e| if g.is_internal_edge(e) { Length::Finite(1.0) } else { Length::Infinite })
            .collect();
        let (kernels, in_s) = ctx.closed_top_kernels(0.0, &lengths)?;
        let values: Vec<Result<Vector, FormError>> = (0..words)
            .into_par_iter()
            .map(|ix| {
                let vs: Vec<Vector> = word(ix, k, n).iter().map(|&i| a.basis[i].clone()).collect();
                let y = ctx.contract(&kernels, &in_s, &Tensor::from_vectors(dim, &vs))?;
                Ok(&coords * Vector::from_vec(y.data))
            })
            .collect();
        for (ix, v) in values.into_iter().enumerate() {
            let v = v?;
            for j in 0..k {
                out[ix * k + j] += v[j] * orient;
            }
        }
    }
    Ok(out)
}

/// Max-norm difference between tree-form products and `m_n`.
pub fn tree_form_residual(spec: &Spectral, a: &CyclicAInfinity, n: usize) -> Result<f64, AInfinityError> {
    let f = tree_form_products(spec, a, n)?;
    let m = a.m(n)?;
    Ok(crate::linalg::max_abs_diff(&f, &m))
}

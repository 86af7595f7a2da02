//! The regularized cubic matrix-model partition function, computed twice:
//! by direct Wick expansion of the Gaussian integral over the gauge slice,
//! and as a weighted sum over trivalent ribbon graphs of integrated forms.

use crate::algebra::{builtins, CyAlgebra};
use crate::forms::{FormContext, FormError, Tensor};
use crate::linalg::{c, column_space, sign, Mat, Vector, C64, ONE, ZERO};
use crate::poly::{Monomial, Poly, Ring};
use crate::ribbon::{enumerate_trivalent, DetTrivialization, GraphError, Length, RibbonGraph};
use crate::spectral::{Kernel2, Spectral, SpectralError};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("partition functions need an odd trace (p = 1)")]
    EvenTrace,
    #[error("regularization parameter must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("matrix size must be positive")]
    ZeroMatrixSize,
    #[error("quadratic form on the gauge slice is degenerate")]
    DegenerateQuadratic,
    #[error("expansion exceeds {0} terms")]
    TooLarge(usize),
    #[error("orientation calibration vanishes on this graph")]
    NoOrientation,
    #[error("orientation needs trivalent internal vertices")]
    NotTrivalent,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Cap on the number of terms held by any intermediate polynomial.
pub const TERM_CAP: usize = 2_000_000;

/// Truncated series in `λ` with polynomial coefficients in the harmonic
/// coordinates of the source. Keys are powers of `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub terms: BTreeMap<i32, Poly>,
}

/// Truncation: source degree at most `n_max`, `λ`-power at most `-chi_min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Truncation {
    pub chi_min: i32,
    pub n_max: usize,
}

impl Truncation {
    /// Largest number of cubic vertices a kept term can have.
    pub fn max_vertices(&self) -> usize {
        (self.n_max as i32 - 2 * self.chi_min).max(0) as usize
    }
    fn vertices(j: i32, n: usize) -> i32 {
        n as i32 + 2 * j
    }
    fn admits(&self, j: i32, n: usize) -> bool {
        n <= self.n_max && Truncation::vertices(j, n) <= self.max_vertices() as i32
    }
    fn reported(&self, j: i32, n: usize) -> bool {
        self.admits(j, n) && j <= -self.chi_min
    }
}

impl Series {
    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0, Poly::constant(ONE));
        Series { terms }
    }
    pub fn zero() -> Self {
        Series { terms: BTreeMap::new() }
    }
    fn add(&mut self, j: i32, p: &Poly) {
        self.terms.entry(j).or_default().add_assign(p);
    }
    fn scaled(&self, z: C64) -> Series {
        Series {
            terms: self.terms.iter().map(|(&j, p)| (j, p.scaled(z))).collect(),
        }
    }
    fn add_series(&mut self, other: &Series) {
        for (&j, p) in &other.terms {
            self.add(j, p);
        }
    }
    fn mul(&self, other: &Series, ring: &Ring, tr: Truncation) -> Series {
        let mut out = Series::zero();
        for (&j1, p1) in &self.terms {
            for (&j2, p2) in &other.terms {
                let j = j1 + j2;
                let prod = ring.mul_truncated(p1, p2, |m| tr.admits(j, m.len()));
                if !prod.is_zero() {
                    out.add(j, &prod);
                }
            }
        }
        out
    }
    fn without_constant(&self) -> Series {
        let mut s = self.clone();
        if let Some(p) = s.terms.get_mut(&0) {
            p.terms.remove(&Vec::new());
        }
        s
    }
    /// `exp` in the truncated ring; the argument must have no constant term.
    pub fn exp(&self, ring: &Ring, tr: Truncation) -> Series {
        let x = self.without_constant();
        let mut out = Series::one();
        let mut power = Series::one();
        for m in 1..=tr.max_vertices() {
            power = power.mul(&x, ring, tr).scaled(c(1.0 / m as f64));
            out.add_series(&power);
        }
        out.pruned(tr)
    }
    /// `log` in the truncated ring; the constant term must be 1.
    pub fn log(&self, ring: &Ring, tr: Truncation) -> Series {
        let x = self.without_constant();
        let mut out = Series::zero();
        let mut power = Series::one();
        for m in 1..=tr.max_vertices() {
            power = power.mul(&x, ring, tr);
            out.add_series(&power.scaled(c(sign(m + 1) / m as f64)));
        }
        out.pruned(tr)
    }
    /// Drops zero coefficients and terms with too many vertices.
    pub fn pruned(mut self, tr: Truncation) -> Series {
        for (&j, p) in self.terms.iter_mut() {
            p.terms.retain(|m, z| z.norm() > 0.0 && (j == 0 && m.is_empty() || tr.admits(j, m.len())));
        }
        self.terms.retain(|_, p| !p.is_zero());
        self
    }
    /// Restriction to `λ`-powers at most `-chi_min`. Products of reported
    /// terms may involve unreported ones, so this is applied last.
    pub fn reported(mut self, tr: Truncation) -> Series {
        for (&j, p) in self.terms.iter_mut() {
            p.terms.retain(|m, _| j == 0 && m.is_empty() || tr.reported(j, m.len()));
        }
        self.terms.retain(|_, p| !p.is_zero());
        self
    }
    /// Largest coefficient difference relative to the larger coefficient,
    /// with an absolute floor.
    pub fn relative_difference(&self, other: &Series, floor: f64) -> f64 {
        let mut worst: f64 = 0.0;
        let keys: std::collections::BTreeSet<(i32, Monomial)> = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .flat_map(|(&j, p)| p.terms.keys().map(move |m| (j, m.clone())))
            .collect();
        for (j, m) in keys {
            let a = self.terms.get(&j).map_or(ZERO, |p| p.coefficient(&m));
            let b = other.terms.get(&j).map_or(ZERO, |p| p.coefficient(&m));
            let scale = a.norm().max(b.norm()).max(floor);
            worst = worst.max((a - b).norm() / scale);
        }
        worst
    }
    pub fn coefficient(&self, j: i32, m: &[u16]) -> C64 {
        self.terms.get(&j).map_or(ZERO, |p| p.coefficient(m))
    }
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, p| acc.max(p.max_abs()))
    }
    /// Flat list of `(λ-power, monomial, coefficient)`.
    pub fn coefficients(&self) -> Vec<(i32, Monomial, C64)> {
        self.terms
            .iter()
            .flat_map(|(&j, p)| p.terms.iter().map(move |(m, &z)| (j, m.clone(), z)))
            .collect()
    }
}

/// Parity-homogeneous basis of the column space of `op`.
fn homogeneous_basis(alg: &CyAlgebra, op: &Mat) -> Vec<(Vector, u8)> {
    let n = alg.dim();
    let mut out = Vec::new();
    for q in 0..2u8 {
        let restrict = Mat::from_fn(n, n, |i, j| if i == j && alg.parity_of(i) == q { ONE } else { ZERO });
        let cols = column_space(&(op * restrict), 1e-9);
        for k in 0..cols.ncols() {
            let v = cols.column(k).into_owned();
            // `op` may be odd: read the parity off the dominant coordinate
            let top = (0..n).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).unwrap_or(0);
            out.push((v, alg.parity_of(top)));
        }
    }
    out
}

/// Parity-homogeneous basis of the harmonic subspace.
pub fn harmonic_basis(spec: &Spectral) -> Vec<(Vector, u8)> {
    homogeneous_basis(spec.algebra(), &spec.harmonic_projector())
}

/// The integration slice `Π Im Q†` of `Mat_N(A)` together with the source
/// directions `Ker H ⊗ Id`.
#[derive(Debug, Clone)]
pub struct Slice {
    pub size: usize,
    pub amplified: Spectral,
    /// Harmonic basis of the base algebra with parities.
    pub harmonic: Vec<(Vector, u8)>,
    /// Elements of `Mat_N(A)` attached to each variable: sources first.
    pub vectors: Vec<Vector>,
    pub vector_parity: Vec<u8>,
    pub ring: Ring,
    pub num_sources: usize,
}

impl Slice {
    pub fn new(base: &CyAlgebra, size: usize, harmonic: Option<Vec<(Vector, u8)>>) -> Result<Self, PartitionError> {
        if base.p() != 1 {
            return Err(PartitionError::EvenTrace);
        }
        if size == 0 {
            return Err(PartitionError::ZeroMatrixSize);
        }
        let harmonic = match harmonic {
            Some(h) => h,
            None => harmonic_basis(&Spectral::new(base)?),
        };
        let amp_alg = base.matrix_amplify(size);
        let amplified = Spectral::new(&amp_alg)?;
        let nb = size * size;
        let mut vectors = Vec::new();
        let mut vector_parity = Vec::new();
        for (h, par) in &harmonic {
            let mut v = Vector::zeros(amp_alg.dim());
            for i in 0..base.dim() {
                for k in 0..size {
                    v[i * nb + k * size + k] = h[i];
                }
            }
            vectors.push(v);
            vector_parity.push(*par);
        }
        for (v, par) in homogeneous_basis(&amp_alg, amplified.qdag()) {
            vectors.push(v);
            vector_parity.push(par);
        }
        let ring = Ring::new(vector_parity.iter().map(|&q| (q + 1) % 2).collect());
        Ok(Slice {
            size,
            amplified,
            num_sources: harmonic.len(),
            harmonic,
            vectors,
            vector_parity,
            ring,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.vectors.len()
    }

    /// Ring of the source coordinates alone.
    pub fn source_ring(&self) -> Ring {
        Ring::new(self.harmonic.iter().map(|(_, q)| (q + 1) % 2).collect())
    }

    fn alg(&self) -> &CyAlgebra {
        self.amplified.algebra()
    }

    /// `½ Tr(B R B)` with `B = Σ β_u w_u` for an odd operator `R`, over the
    /// given variables.
    fn quadratic(&self, r: &Mat, vars: &[usize]) -> Poly {
        let alg = self.alg();
        let mut out = Poly::zero();
        for &u in vars {
            for &w in vars {
                let rw = r * &self.vectors[w];
                let z = alg.pairing(&self.vectors[u], &rw);
                if z.norm() < 1e-300 {
                    continue;
                }
                let s = sign((self.ring.parity_of(w as u16) * (1 + self.vector_parity[u])) as usize);
                let prod = self.ring.mul(&self.ring.var(u as u16), &self.ring.var(w as u16));
                out.add_assign(&prod.scaled(z * (0.5 * s)));
            }
        }
        out
    }

    /// `⅓ Tr(B^3)` with `B = Σ β_u w_u`.
    pub fn cubic(&self) -> Poly {
        let alg = self.alg();
        let nv = self.num_vars();
        let bp = |u: usize| self.ring.parity_of(u as u16) as usize;
        let wp = |u: usize| self.vector_parity[u] as usize;
        let mut out = Poly::zero();
        for u in 0..nv {
            for v in 0..nv {
                let uv = alg.multiply(&self.vectors[u], &self.vectors[v]);
                for w in 0..nv {
                    let z = alg.pairing(&uv, &self.vectors[w]);
                    if z.norm() < 1e-300 {
                        continue;
                    }
                    let s = sign(wp(u) * bp(v) + (wp(u) + wp(v)) * bp(w));
                    let prod = self
                        .ring
                        .mul(&self.ring.mul(&self.ring.var(u as u16), &self.ring.var(v as u16)), &self.ring.var(w as u16));
                    out.add_assign(&prod.scaled(z * (s / 3.0)));
                }
            }
        }
        out
    }

    /// The action `½ Tr(BQB) + ⅓ Tr(B^3)` as a polynomial in all coordinates.
    pub fn action(&self) -> Poly {
        let all: Vec<usize> = (0..self.num_vars()).collect();
        let mut s = self.quadratic(self.alg().q(), &all);
        s.add_assign(&self.cubic());
        s
    }

    /// Matrix `M` with `∂_k S_2 = Σ_j M_kj β_j` for the regularized
    /// quadratic part `½ Tr(B Q e^{εH} B)` on the slice.
    pub fn quadratic_matrix(&self, eps: f64) -> Mat {
        let r = self.alg().q() * self.amplified.function_of_h(|l| (eps * l).exp());
        let b: Vec<usize> = (self.num_sources..self.num_vars()).collect();
        let s2 = self.quadratic(&r, &b);
        Mat::from_fn(b.len(), b.len(), |k, j| {
            self.ring.derivative(b[k] as u16, &s2).coefficient(&[b[j] as u16])
        })
    }
}

/// Gaussian expectations over the slice with propagator `C = -M^{-1}`,
/// one power of `λ` per contraction.
struct Wick<'a> {
    ring: &'a Ring,
    offset: u16,
    prop: Mat,
    memo: HashMap<Monomial, C64>,
}

impl<'a> Wick<'a> {
    fn expect(&mut self, m: &[u16]) -> C64 {
        if m.is_empty() {
            return ONE;
        }
        if m.len() % 2 == 1 {
            return ZERO;
        }
        if let Some(&z) = self.memo.get(m) {
            return z;
        }
        // <β_j F> = Σ_k C_jk <∂_k F>
        let j = (m[0] - self.offset) as usize;
        let rest = &m[1..];
        let mut total = ZERO;
        let mut seen: Vec<u16> = rest.to_vec();
        seen.dedup();
        for &kv in &seen {
            let k = (kv - self.offset) as usize;
            let cjk = self.prop[(j, k)];
            if cjk == ZERO {
                continue;
            }
            if let Some((r, coeff)) = self.ring.monomial_derivative(kv, rest) {
                total += cjk * coeff * self.expect(&r);
            }
        }
        self.memo.insert(m.to_vec(), total);
        total
    }
}

/// `Z` by Wick expansion of `exp(⅓Tr B^3/λ)` against the regularized Gaussian
/// on the slice, normalized so the vertex-free series is 1.
pub fn wick_full(slice: &Slice, eps: f64, tr: Truncation) -> Result<Series, PartitionError> {
    if !(eps > 0.0) {
        return Err(PartitionError::NonPositiveEpsilon(eps));
    }
    let ns = slice.num_sources as u16;
    let m = slice.quadratic_matrix(eps);
    let prop = -m.try_inverse().ok_or(PartitionError::DegenerateQuadratic)?;
    let ring = &slice.ring;
    let cubic = slice.cubic();
    let keep = |mono: &[u16]| mono.iter().filter(|&&v| v < ns).count() <= tr.n_max;
    let mut wick = Wick {
        ring,
        offset: ns,
        prop,
        memo: HashMap::new(),
    };
    let mut z = Series::one();
    let mut power = Poly::constant(ONE);
    for k in 1..=tr.max_vertices() {
        power = ring.mul_truncated(&power, &cubic, keep).scaled(c(1.0 / k as f64));
        if power.terms.len() > TERM_CAP {
            return Err(PartitionError::TooLarge(TERM_CAP));
        }
        for (mono, &coef) in &power.terms {
            let split = mono.iter().position(|&v| v >= ns).unwrap_or(mono.len());
            let (src, rest) = mono.split_at(split);
            if rest.len() % 2 == 1 {
                continue;
            }
            let j = (rest.len() / 2) as i32 - k as i32;
            if !tr.admits(j, src.len()) {
                continue;
            }
            let val = wick.expect(rest);
            if val == ZERO {
                continue;
            }
            let mut p = Poly::zero();
            p.add_term(src.to_vec(), coef * val);
            z.add(j, &p);
        }
    }
    Ok(z.pruned(tr))
}

/// Connected part `log Z` of the Wick expansion.
pub fn wick_oracle(slice: &Slice, eps: f64, tr: Truncation) -> Result<Series, PartitionError> {
    Ok(wick_full(slice, eps, tr)?.log(&slice.source_ring(), tr))
}

/// `∫_a^b L_t dt` as a kernel.
fn box_kernel(spec: &Spectral, a: f64, b: f64) -> Kernel2 {
    let g = spec.function_of_h(|l| if l == 0.0 { b - a } else { ((-a * l).exp() - (-b * l).exp()) / l });
    Kernel2 {
        coeffs: -(spec.qdag() * spec.kernel_of_operator(&g)),
        parity: (spec.p() + 1) % 2,
    }
}

fn check_trivalent(g: &RibbonGraph) -> Result<(), PartitionError> {
    let ok = g
        .internal_vertices()
        .iter()
        .all(|&v| g.vertices()[v].len() == 3);
    if ok && g.outgoing().len() <= 1 {
        Ok(())
    } else {
        Err(PartitionError::NotTrivalent)
    }
}

/// Sign making the top-degree form of the toy algebra integrate positively
/// over the box `[1/2, 3/2]^{E_int}`, legs fed with `x` and an outgoing leg
/// paired with `x`.
pub fn orientation_sign(g: &RibbonGraph, triv: &DetTrivialization) -> Result<i32, PartitionError> {
    check_trivalent(g)?;
    let toy = builtins::toy();
    let spec = Spectral::new(&toy)?;
    let ctx = FormContext::new(&spec, g.clone(), triv.clone())?;
    let bx = box_kernel(&spec, 0.5, 1.5);
    let mut in_s = vec![false; g.num_edges()];
    let kernels: Vec<Kernel2> = (0..g.num_edges())
        .map(|e| {
            if g.is_internal_edge(e) {
                in_s[e] = true;
                bx.clone()
            } else {
                ctx.edge_kernel(Length::Finite(0.0), false, crate::forms::EdgeRole::Plain)
            }
        })
        .collect();
    let x = crate::linalg::basis_vector(toy.dim(), 1);
    let f = Tensor::from_vectors(toy.dim(), &vec![x.clone(); g.incoming().len()]);
    let out = ctx.contract(&kernels, &in_s, &f)?;
    let z = if g.outgoing().is_empty() {
        out.data[0]
    } else {
        toy.pairing(&Vector::from_vec(out.data), &x)
    };
    if z.norm() < 1e-12 {
        return Err(PartitionError::NoOrientation);
    }
    Ok(if z.re > 0.0 { 1 } else { -1 })
}

/// Weight of one connected trivalent graph.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphWeight {
    pub genus: usize,
    pub boundaries: usize,
    pub legs: usize,
    pub automorphisms: usize,
    pub orientation: i32,
    /// Nonzero coefficients by source monomial.
    #[serde(skip)]
    pub weight: Poly,
}

/// `w(γ)`: oriented integral over `[eps, ∞)^{E_int}` of the top form fed
/// with `a^{⊗n}`, as a polynomial in the source coordinates.
pub fn graph_weight(
    spec: &Spectral,
    harmonic: &[(Vector, u8)],
    g: &RibbonGraph,
    eps: f64,
) -> Result<(Poly, i32), PartitionError> {
    if !(eps > 0.0) {
        return Err(PartitionError::NonPositiveEpsilon(eps));
    }
    let triv = g.default_trivialization();
    let orient = orientation_sign(g, &triv)?;
    let ctx = FormContext::new(spec, g.clone(), triv)?;
    let n = g.incoming().len();
    let dim = spec.dim();
    let lengths = vec![Length::Finite(0.0); g.num_edges()];
    let ring = Ring::new(harmonic.iter().map(|(_, q)| (q + 1) % 2).collect());
    let ha = harmonic.len();
    let (kernels, in_s) = ctx.closed_top_kernels(eps, &lengths)?;
    let mut out = Poly::zero();
    for idx in 0..ha.pow(n as u32) {
        let mut multi = vec![0usize; n];
        let mut r = idx;
        for k in (0..n).rev() {
            multi[k] = r % ha;
            r /= ha;
        }
        let vs: Vec<Vector> = multi.iter().map(|&i| harmonic[i].0.clone()).collect();
        let f = Tensor::from_vectors(dim, &vs);
        let z = ctx.contract(&kernels, &in_s, &f)?.data[0];
        if z.norm() < 1e-300 {
            continue;
        }
        // a^{⊗n}: coordinate a_{i_k} moves left past h_{i_1}..h_{i_{k-1}}
        let mut odd = 0usize;
        let mut mono = Poly::constant(ONE);
        for (k, &i) in multi.iter().enumerate() {
            let ai = ring.parity_of(i as u16) as usize;
            let before: usize = multi[..k].iter().map(|&j| harmonic[j].1 as usize).sum();
            odd += ai * before;
            mono = ring.mul(&mono, &ring.var(i as u16));
        }
        out.add_assign(&mono.scaled(z * (sign(odd) * orient as f64)));
    }
    Ok((out, orient))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Connected sum `Σ λ^{-χ} N^h w(γ) / (n! |Aut γ|)` over trivalent classes,
/// with the individual weights.
pub fn feynman_sum(
    base: &CyAlgebra,
    harmonic: Option<Vec<(Vector, u8)>>,
    size: usize,
    eps: f64,
    tr: Truncation,
) -> Result<(Series, Vec<GraphWeight>), PartitionError> {
    if base.p() != 1 {
        return Err(PartitionError::EvenTrace);
    }
    let spec = Spectral::new(base)?;
    let harmonic = harmonic.unwrap_or_else(|| harmonic_basis(&spec));
    let mut shapes = Vec::new();
    for n in 0..=tr.n_max {
        for chi in -(tr.max_vertices() as i32)..=(n as i32) {
            let v = n as i32 - 2 * chi;
            if v <= 0 || v as usize > tr.max_vertices() {
                continue;
            }
            for g in 0..=((2 - chi) / 2).max(0) as usize {
                let h = 2 - 2 * g as i32 - chi;
                if h >= 1 {
                    shapes.push((g, h as usize, n, chi));
                }
            }
        }
    }
    let mut classes = Vec::new();
    for &(g, h, n, chi) in &shapes {
        for class in enumerate_trivalent(g, h, n)? {
            classes.push((g, h, n, chi, class));
        }
    }
    let weights: Vec<Result<(GraphWeight, i32), PartitionError>> = classes
        .par_iter()
        .map(|(g, h, n, chi, class)| {
            let (w, orient) = graph_weight(&spec, &harmonic, &class.graph, eps)?;
            Ok((
                GraphWeight {
                    genus: *g,
                    boundaries: *h,
                    legs: *n,
                    automorphisms: class.automorphisms,
                    orientation: orient,
                    weight: w,
                },
                *chi,
            ))
        })
        .collect();
    let mut series = Series::zero();
    let mut out = Vec::new();
    for r in weights {
        let (gw, chi) = r?;
        let factor = (size as f64).powi(gw.boundaries as i32) / (factorial(gw.legs) * gw.automorphisms as f64);
        series.add(-chi, &gw.weight.scaled(c(factor)));
        out.push(gw);
    }
    Ok((series.pruned(tr), out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_action_on_a_line() {
        // B = b x with b even
        let toy = builtins::toy();
        let slice = Slice::new(&toy, 1, None).unwrap();
        let s = slice.action();
        let b = slice.num_sources as u16;
        assert_eq!(slice.num_vars(), slice.num_sources + 1);
        // the slice vector is a multiple of x; rescale to b x
        let scale = slice.vectors[b as usize][1];
        let quad = s.coefficient(&[b, b]) * scale.powi(-2);
        let cub = s.coefficient(&[b, b, b]) * scale.powi(-3);
        assert!((quad - c(-0.5)).norm() < 1e-15);
        assert!((cub - c(1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn exp_inverts_log() {
        let ring = Ring::new(vec![0, 1]);
        let tr = Truncation { chi_min: -1, n_max: 3 };
        let mut x = Series::zero();
        let mut p = Poly::zero();
        p.add_term(vec![0, 1], c(0.7));
        p.add_term(vec![0], c(-0.2));
        x.add(0, &p);
        x.add(1, &Poly::constant(c(0.3)));
        let x = x.pruned(tr);
        let back = x.exp(&ring, tr).log(&ring, tr);
        // coefficients are O(1); round-off creates tiny spurious terms
        assert!(back.relative_difference(&x, 1.0) < 1e-12);
    }
}

//! Differential forms on the space of metrics of a ribbon graph, built by
//! contracting heat kernels along edges with trace tensors at vertices.
//!
//! A form coefficient is indexed by a subset `S` of edges: edges in `S`
//! carry `dl_e L_{l_e}`, the others `K_{l_e}`. Coefficients are taken with
//! respect to `dl_{s_1} ... dl_{s_k}` in increasing edge index.
//!
//! Sign convention. The super sequence is `T_{v_1} .. T_{v_r}` (one trace
//! functional of parity `p` per non-outgoing vertex, in the trivialization's
//! vertex order), then for each edge in the trivialization's edge order
//! `[dl_e] x_{h0} x_{h1}` with the edge's kernel on the oriented darts, then
//! the inputs. It is Koszul-rearranged to
//! `dl_S T_1 G_1 .. T_r G_r outs`, where `G_v` is the cyclic dart list of an
//! internal vertex or `[dart, f_i]` for incoming vertex `i`, and each
//! `T_v(G_v)` is the trace of the product.

use crate::linalg::{c, sign, Mat, C64, ONE, ZERO};
use crate::network::{Network, Slot};
use crate::ribbon::{DetTrivialization, GraphError, Length, RibbonGraph};
use crate::spectral::{Kernel2, Spectral, SpectralError, Time};
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("expected {expected} input slots, found {found}")]
    InputRank { expected: usize, found: usize },
    #[error("input tensor dimension {found} does not match algebra dimension {expected}")]
    InputDim { expected: usize, found: usize },
    #[error("expected {expected} kernels, found {found}")]
    KernelCount { expected: usize, found: usize },
    #[error("edge {0} is not internal")]
    NotInternal(usize),
    #[error("edge {0} must have positive length here")]
    NonPositive(usize),
    #[error("quadrature did not converge: estimated error {0:e}")]
    Quadrature(f64),
}

/// Dense element of `A^{⊗rank}`, first slot slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub dim: usize,
    pub rank: usize,
    pub data: Vec<C64>,
}

impl Tensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Tensor {
            dim,
            rank,
            data: vec![ZERO; dim.pow(rank as u32)],
        }
    }

    pub fn scalar(dim: usize, z: C64) -> Self {
        Tensor {
            dim,
            rank: 0,
            data: vec![z],
        }
    }

    /// `v_1 ⊗ .. ⊗ v_k` in coordinates.
    pub fn from_vectors(dim: usize, vs: &[crate::linalg::Vector]) -> Self {
        let mut t = Tensor::scalar(dim, ONE);
        for v in vs {
            let mut data = Vec::with_capacity(t.data.len() * dim);
            for &a in &t.data {
                data.extend(v.iter().map(|&b| a * b));
            }
            t = Tensor {
                dim,
                rank: t.rank + 1,
                data,
            };
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        crate::linalg::max_abs_slice(&self.data)
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        crate::linalg::max_abs_diff(&self.data, &other.data)
    }

    pub fn scaled(mut self, z: C64) -> Self {
        self.data.iter_mut().for_each(|x| *x *= z);
        self
    }

    pub fn add_assign(&mut self, other: &Tensor) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Applies `op` (acting on coordinate columns) to slot `k`. An odd `op`
    /// picks up the parity of the slots to its left.
    pub fn apply_slot(&self, op: &Mat, k: usize, odd: bool, parity: &[u8]) -> Tensor {
        let n = self.dim;
        let inner = n.pow((self.rank - k - 1) as u32);
        let mut out = Tensor::zeros(n, self.rank);
        for (ix, &z) in self.data.iter().enumerate() {
            if z == ZERO {
                continue;
            }
            let a = (ix / inner) % n;
            let left_par: usize = (0..k).map(|j| parity[(ix / n.pow((self.rank - j - 1) as u32)) % n] as usize).sum();
            let s = if odd { sign(left_par) } else { 1.0 };
            let base = ix - a * inner;
            for b in 0..n {
                let w = op[(b, a)];
                if w != ZERO {
                    out.data[base + b * inner] += z * w * s;
                }
            }
        }
        out
    }

    /// Entrywise multiplication by `(-1)^{k * total parity}`.
    pub fn parity_twist(&self, k: usize, parity: &[u8]) -> Tensor {
        let mut out = self.clone();
        if k.is_multiple_of(2) {
            return out;
        }
        let n = self.dim;
        for (ix, z) in out.data.iter_mut().enumerate() {
            let mut tot = 0usize;
            let mut x = ix;
            for _ in 0..self.rank {
                tot += parity[x % n] as usize;
                x /= n;
            }
            if tot % 2 == 1 {
                *z = -*z;
            }
        }
        out
    }
}

/// Trace tensors `Tr(e_{a_1} .. e_{a_k})`, pre-signed for pairwise contraction.
#[derive(Debug, Default)]
pub struct TraceTensors {
    cache: Mutex<HashMap<usize, Arc<Vec<C64>>>>,
}

impl TraceTensors {
    fn get(&self, spec: &Spectral, k: usize) -> Arc<Vec<C64>> {
        if let Some(t) = self.cache.lock().unwrap().get(&k) {
            return t.clone();
        }
        let alg = spec.algebra();
        let n = alg.dim();
        let par = alg.parity();
        // right multiplication matrices (v e_a)_k = sum_i v_i m(i,a,k)
        let mut level: Vec<(Vec<C64>, usize)> = (0..n)
            .map(|a| {
                let mut v = vec![ZERO; n];
                v[a] = ONE;
                (v, par[a] as usize)
            })
            .collect();
        // second component tracks sum_{i<j} |a_i||a_j| mod 2 and the running parity
        let mut pair_par: Vec<usize> = vec![0; n];
        for _ in 1..k {
            let mut next = Vec::with_capacity(level.len() * n);
            let mut next_pp = Vec::with_capacity(level.len() * n);
            for ((v, run), pp) in level.iter().zip(&pair_par) {
                for a in 0..n {
                    let mut w = vec![ZERO; n];
                    for (i, &vi) in v.iter().enumerate() {
                        if vi == ZERO {
                            continue;
                        }
                        for (kk, wk) in w.iter_mut().enumerate() {
                            *wk += vi * alg.m(i, a, kk);
                        }
                    }
                    next.push((w, run + par[a] as usize));
                    next_pp.push(pp + run * par[a] as usize);
                }
            }
            level = next;
            pair_par = next_pp;
        }
        let tr = alg.trace_vec();
        let data: Vec<C64> = level
            .iter()
            .zip(&pair_par)
            .map(|((v, _), pp)| {
                let z: C64 = v.iter().zip(tr).map(|(a, b)| a * b).sum();
                z * sign(*pp)
            })
            .collect();
        let arc = Arc::new(data);
        self.cache.lock().unwrap().insert(k, arc.clone());
        arc
    }
}

/// Which kernel sits on an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeRole {
    /// `K_l` (or `dl L_l` if the edge is in `S`).
    Plain,
    /// `d/dl` of the plain kernel.
    Derivative,
}

/// Evaluates form coefficients of one graph under one trivialization.
#[derive(Debug)]
pub struct FormContext<'a> {
    spec: &'a Spectral,
    graph: RibbonGraph,
    triv: DetTrivialization,
}

impl<'a> FormContext<'a> {
    pub fn new(spec: &'a Spectral, graph: RibbonGraph, triv: DetTrivialization) -> Result<Self, FormError> {
        graph.check_trivialization(&triv)?;
        Ok(FormContext {
            spec,
            graph,
            triv,
        })
    }

    pub fn with_default(spec: &'a Spectral, graph: RibbonGraph) -> Self {
        let triv = graph.default_trivialization();
        FormContext::new(spec, graph, triv).expect("default trivialization is valid")
    }

    pub fn graph(&self) -> &RibbonGraph {
        &self.graph
    }

    pub fn trivialization(&self) -> &DetTrivialization {
        &self.triv
    }

    pub fn spectral(&self) -> &Spectral {
        self.spec
    }

    /// Kernel on an edge of length `l`, in `S` or not, possibly differentiated.
    pub fn edge_kernel(&self, l: Length, in_s: bool, role: EdgeRole) -> Kernel2 {
        let sp = self.spec;
        let p = sp.p();
        let op = match (l, role) {
            (Length::Finite(t), EdgeRole::Plain) => sp.heat_operator(Time::Finite(t)),
            (Length::Infinite, EdgeRole::Plain) => sp.harmonic_projector(),
            (Length::Finite(t), EdgeRole::Derivative) => sp.heat_derivative(t),
            (Length::Infinite, EdgeRole::Derivative) => Mat::zeros(sp.dim(), sp.dim()),
        };
        let k = sp.kernel_of_operator(&op);
        if in_s {
            Kernel2 {
                coeffs: -(sp.qdag() * k),
                parity: (p + 1) % 2,
            }
        } else {
            Kernel2 { coeffs: k, parity: p }
        }
    }

    /// Coefficient of `dl_S` at the given lengths.
    pub fn coefficient(&self, lengths: &[Length], subset: &[usize], f: &Tensor) -> Result<Tensor, FormError> {
        let in_s = self.subset_mask(subset);
        let kernels: Vec<Kernel2> = lengths
            .iter()
            .zip(&in_s)
            .map(|(&l, &s)| self.edge_kernel(l, s, EdgeRole::Plain))
            .collect();
        self.contract(&kernels, &in_s, f)
    }

    /// `∂/∂l_e` of the coefficient of `dl_S` (`e` not in `S`).
    pub fn coefficient_derivative(
        &self,
        lengths: &[Length],
        subset: &[usize],
        e: usize,
        f: &Tensor,
    ) -> Result<Tensor, FormError> {
        let in_s = self.subset_mask(subset);
        let kernels: Vec<Kernel2> = lengths
            .iter()
            .zip(&in_s)
            .enumerate()
            .map(|(x, (&l, &s))| {
                let role = if x == e { EdgeRole::Derivative } else { EdgeRole::Plain };
                self.edge_kernel(l, s, role)
            })
            .collect();
        self.contract(&kernels, &in_s, f)
    }

    fn subset_mask(&self, subset: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.graph.num_edges()];
        for &e in subset {
            m[e] = true;
        }
        m
    }

    /// Contracts arbitrary edge kernels; `in_s` marks edges carrying `dl`.
    pub fn contract(&self, kernels: &[Kernel2], in_s: &[bool], f: &Tensor) -> Result<Tensor, FormError> {
        let g = &self.graph;
        let t = &self.triv;
        let alg = self.spec.algebra();
        let par = alg.parity();
        let n = alg.dim();
        let p = self.spec.p() as usize;
        if kernels.len() != g.num_edges() {
            return Err(FormError::KernelCount {
                expected: g.num_edges(),
                found: kernels.len(),
            });
        }
        if f.rank != g.incoming().len() {
            return Err(FormError::InputRank {
                expected: g.incoming().len(),
                found: f.rank,
            });
        }
        if f.dim != n {
            return Err(FormError::InputDim { expected: n, found: f.dim });
        }
        let r = t.vertex_order.len();

        // move every dl to the front, then sort them by edge index
        let mut dl_exp = 0usize;
        let mut passed = 0usize;
        let mut dl_seq = Vec::new();
        for &e in &t.edge_order {
            if in_s[e] {
                dl_exp += r * p + passed;
                dl_seq.push(e);
            }
            passed += kernels[e].parity as usize;
        }
        let mut dl_sorted = dl_seq.clone();
        dl_sorted.sort_unstable();
        let dl_sign = sign(dl_exp) * crate::ribbon::permutation_sign(&dl_seq, &dl_sorted) as f64;

        // canonical block list: vertices then edges; the inputs go first
        #[derive(Clone, Copy)]
        enum Block {
            Vertex(usize),
            Edge(usize),
        }
        let canon: Vec<Block> = t
            .vertex_order
            .iter()
            .map(|&v| Block::Vertex(v))
            .chain(t.edge_order.iter().map(|&e| Block::Edge(e)))
            .collect();
        let block_parity = |b: &Block| match b {
            Block::Vertex(_) => p,
            Block::Edge(e) => kernels[*e].parity as usize,
        };
        let total_parity: usize = canon.iter().map(block_parity).sum();
        let f_moved = f.parity_twist(total_parity, par);

        let block_slots = |b: &Block| -> Vec<Slot> {
            match *b {
                Block::Vertex(v) => {
                    if let Some(i) = g.incoming().iter().position(|&x| x == v) {
                        vec![Slot::CoDart(g.external_dart(v)), Slot::CoInput(i)]
                    } else {
                        g.vertices()[v].iter().map(|&h| Slot::CoDart(h)).collect()
                    }
                }
                Block::Edge(e) => {
                    let [h0, h1] = g.oriented(e, t);
                    vec![Slot::Dart(h0), Slot::Dart(h1)]
                }
            }
        };

        // greedy processing order keeping the open slot count small
        let mut open: BTreeSet<Slot> = (0..f.rank).map(Slot::Input).collect();
        let mut remaining: Vec<usize> = (0..canon.len()).collect();
        let mut order = Vec::new();
        let partner = |s: Slot| match s {
            Slot::Dart(h) => Slot::CoDart(h),
            Slot::CoDart(h) => Slot::Dart(h),
            Slot::Input(i) => Slot::CoInput(i),
            Slot::CoInput(i) => Slot::Input(i),
        };
        while !remaining.is_empty() {
            let (best_pos, _) = remaining
                .iter()
                .enumerate()
                .map(|(pos, &bi)| {
                    let slots = block_slots(&canon[bi]);
                    let matched = slots.iter().filter(|s| open.contains(&partner(**s))).count();
                    let size = open.len() + slots.len() - 2 * matched;
                    (pos, (size, bi))
                })
                .min_by_key(|(_, key)| *key)
                .unwrap();
            let bi = remaining.remove(best_pos);
            for s in block_slots(&canon[bi]) {
                if !open.remove(&partner(s)) {
                    open.insert(s);
                }
            }
            order.push(bi);
        }
        let mut reorder_odd = 0;
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                if order[i] > order[j] {
                    reorder_odd += block_parity(&canon[order[i]]) * block_parity(&canon[order[j]]);
                }
            }
        }

        let mut net = Network::scalar(par, c(dl_sign * sign(reorder_odd)));
        let in_slots: Vec<Slot> = (0..f.rank).map(Slot::Input).collect();
        net.absorb(&in_slots, &f_moved.data);
        for &bi in &order {
            let b = canon[bi];
            let slots = block_slots(&b);
            match b {
                Block::Vertex(_) => {
                    let tt = self.spec.traces().get(self.spec, slots.len());
                    net.absorb(&slots, &tt);
                }
                Block::Edge(e) => {
                    let k = &kernels[e].coeffs;
                    let data: Vec<C64> = (0..n * n).map(|ix| k[(ix / n, ix % n)]).collect();
                    net.absorb(&slots, &data);
                }
            }
        }
        let outs: Vec<Slot> = g.outgoing().iter().map(|&v| Slot::Dart(g.external_dart(v))).collect();
        let data = net.into_order(&outs);
        Ok(Tensor {
            dim: n,
            rank: outs.len(),
            data,
        })
    }

    /// All coefficients `c_S` for subsets of `edges`, keyed by sorted subset.
    pub fn form(&self, lengths: &[Length], edges: &[usize], f: &Tensor) -> Result<Vec<(Vec<usize>, Tensor)>, FormError> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << edges.len()) {
            let s: Vec<usize> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            out.push((s.clone(), self.coefficient(lengths, &s, f)?));
        }
        Ok(out)
    }
}

/// Residual of a form identity together with the size of the terms involved.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Check {
    pub residual: f64,
    pub scale: f64,
}

impl Check {
    fn new(residual: f64, scale: f64) -> Self {
        Check { residual, scale }
    }
    pub fn merge(self, other: Check) -> Check {
        Check {
            residual: self.residual.max(other.residual),
            scale: self.scale.max(other.scale),
        }
    }
    pub const ZERO: Check = Check {
        residual: 0.0,
        scale: 0.0,
    };
}

/// All subsets of `items`, each sorted.
pub fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0u64..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect()
        })
        .collect()
}

fn pow_sign(s: i32, p: u8) -> f64 {
    if p % 2 == 1 {
        s as f64
    } else {
        1.0
    }
}

/// Setting `l_e = 0` on an internal non-loop edge `e ∉ S` gives the form of
/// `γ/e` with the induced trivialization, up to the induced det sign.
pub fn restriction_check(
    spec: &Spectral,
    graph: &RibbonGraph,
    triv: &DetTrivialization,
    e: usize,
    lengths: &[Length],
    subset: &[usize],
    f: &Tensor,
) -> Result<Check, FormError> {
    if subset.contains(&e) {
        return Err(FormError::NotInternal(e));
    }
    let contraction = graph.contract_edge(e)?;
    let (t2, eps) = graph.induced_contraction(e, triv, &contraction);
    let mut at_zero = lengths.to_vec();
    at_zero[e] = Length::Finite(0.0);
    let lhs = FormContext::new(spec, graph.clone(), triv.clone())?.coefficient(&at_zero, subset, f)?;
    let mut l2 = vec![Length::Finite(0.0); contraction.graph.num_edges()];
    for (x, m) in contraction.edge_map.iter().enumerate() {
        if let Some(y) = m {
            l2[*y] = lengths[x];
        }
    }
    let s2: Vec<usize> = subset.iter().map(|&x| contraction.edge_map[x].unwrap()).collect();
    let rhs = FormContext::new(spec, contraction.graph.clone(), t2)?
        .coefficient(&l2, &s2, f)?
        .scaled(c(pow_sign(eps, spec.p())));
    Ok(Check::new(lhs.max_abs_diff(&rhs), lhs.max_abs().max(rhs.max_abs())))
}

/// Residual of the closedness identity for the coefficient of `dl_S`; see
/// [`closedness_terms`].
pub fn closedness_check(ctx: &FormContext, lengths: &[Length], subset: &[usize], f: &Tensor) -> Result<Check, FormError> {
    let (d, qo, qi) = closedness_terms(ctx, lengths, subset, f)?;
    let mut total = d.clone();
    total.add_assign(&qo);
    total.add_assign(&qi.clone().scaled(c(-1.0)));
    Ok(Check::new(total.max_abs(), d.max_abs().max(qo.max_abs()).max(qi.max_abs())))
}

/// The three terms of the closedness identity for the coefficient of
/// `dl_S`: the de Rham part `Σ_{e∈S} (-1)^{#{x∈S, x<e}} ∂_e c_{S∖e}`,
/// the output part `(-1)^{|S|} Σ_k Q_k c_{S}` and the input part
/// `Σ_i c_{S}(Q_i f)`, where `Q_k` acts on slot `k` with the Koszul sign of
/// the slots before it. The identity is `D + out - in = 0`.
pub fn closedness_terms(
    ctx: &FormContext,
    lengths: &[Length],
    subset: &[usize],
    f: &Tensor,
) -> Result<(Tensor, Tensor, Tensor), FormError> {
    let sp = ctx.spectral();
    let alg = sp.algebra();
    let par = alg.parity();
    let q = alg.q();
    let n = alg.dim();
    let rank_out = ctx.graph().outgoing().len();
    let mut s = subset.to_vec();
    s.sort_unstable();
    let mut d = Tensor::zeros(n, rank_out);
    for (k, &e) in s.iter().enumerate() {
        let rest: Vec<usize> = s.iter().cloned().filter(|&x| x != e).collect();
        let t = ctx.coefficient_derivative(lengths, &rest, e, f)?;
        d.add_assign(&t.scaled(c(sign(k))));
    }
    let cs = ctx.coefficient(lengths, &s, f)?;
    let mut out = Tensor::zeros(n, rank_out);
    for k in 0..rank_out {
        out.add_assign(&cs.apply_slot(q, k, true, par));
    }
    let out = out.scaled(c(sign(s.len())));
    let mut inp = Tensor::zeros(n, rank_out);
    for i in 0..f.rank {
        let qf = f.apply_slot(q, i, true, par);
        inp.add_assign(&ctx.coefficient(lengths, &s, &qf)?);
    }
    Ok((d, out, inp))
}

/// Changing the trivialization multiplies every coefficient by `det_sign^p`.
pub fn covariance_check(
    spec: &Spectral,
    graph: &RibbonGraph,
    t1: &DetTrivialization,
    t2: &DetTrivialization,
    lengths: &[Length],
    subset: &[usize],
    f: &Tensor,
) -> Result<Check, FormError> {
    let a = FormContext::new(spec, graph.clone(), t1.clone())?.coefficient(lengths, subset, f)?;
    let b = FormContext::new(spec, graph.clone(), t2.clone())?.coefficient(lengths, subset, f)?;
    let s = pow_sign(crate::ribbon::det_sign(t1, t2), spec.p());
    let scale = a.max_abs().max(b.max_abs());
    Ok(Check::new(a.scaled(c(s)).max_abs_diff(&b), scale))
}

/// Gluing: composing the coefficient maps of `left` (then) `right` equals the
/// composite's coefficient at the summed lengths, up to the wedge reordering
/// and the induced det sign. Checked for every pair of subsets.
#[allow(clippy::too_many_arguments)]
pub fn gluing_check(
    spec: &Spectral,
    left: &RibbonGraph,
    t1: &DetTrivialization,
    right: &RibbonGraph,
    t2: &DetTrivialization,
    l1: &[Length],
    l2: &[Length],
    f: &Tensor,
) -> Result<Check, FormError> {
    let glued = left.glue(right)?;
    let p = spec.p();
    let (tg, kappa) = glued.induced_trivialization(left, right, t1, t2, p);
    let lg: Vec<Length> = glued
        .origin
        .iter()
        .map(|o| match *o {
            crate::ribbon::EdgeOrigin::Left(a) => l1[a],
            crate::ribbon::EdgeOrigin::Right(b) => l2[b],
            crate::ribbon::EdgeOrigin::Welded(a, b) => match (l1[a], l2[b]) {
                (Length::Finite(x), Length::Finite(y)) => Length::Finite(x + y),
                _ => Length::Infinite,
            },
        })
        .collect();
    let c1 = FormContext::new(spec, left.clone(), t1.clone())?;
    let c2 = FormContext::new(spec, right.clone(), t2.clone())?;
    let cg = FormContext::new(spec, glued.graph.clone(), tg)?;
    let r2 = t2.vertex_order.len();
    let shift = (p as usize) * (r2 + right.num_edges());
    let mut check = Check::ZERO;
    let all1: Vec<usize> = (0..left.num_edges()).collect();
    let all2: Vec<usize> = (0..right.num_edges()).collect();
    let mids: Vec<(Vec<usize>, Tensor)> = subsets(&all1)
        .into_iter()
        .map(|s1| c1.coefficient(l1, &s1, f).map(|m| (s1, m)))
        .collect::<Result<_, _>>()?;
    for (s1, mid) in &mids {
        for s2 in subsets(&all2) {
            let mut seq: Vec<usize> = s1.iter().map(|&a| glued.from_left(a)).collect();
            seq.extend(s2.iter().map(|&b| glued.from_right(b)));
            let mut s = seq.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() < seq.len() {
                // both halves of a welded edge carry dl: the composite vanishes
                let lhs = c2.coefficient(l2, &s2, mid)?;
                check = check.merge(Check::new(lhs.max_abs(), lhs.max_abs()));
                continue;
            }
            let lhs = c2.coefficient(l2, &s2, mid)?;
            let rhs = cg.coefficient(&lg, &s, f)?;
            let sgn = crate::ribbon::permutation_sign(&seq, &s) as f64 * sign(s1.len() * shift) * kappa as f64;
            check = check.merge(Check::new(
                lhs.scaled(c(sgn)).max_abs_diff(&rhs),
                rhs.max_abs(),
            ));
        }
    }
    Ok(check)
}

/// How to integrate the top-degree component over `[eps, ∞)^{E_int}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integration {
    /// Factorized: each internal edge carries `∫_eps^∞ L_t dt = -P_eps`.
    Closed,
    /// Nested adaptive Gauss-Kronrod over every internal length.
    Quadrature { rel_tol: f64 },
}

impl<'a> FormContext<'a> {
    /// Integral of the coefficient of `dl_{E_int}` over `[eps, ∞)^{E_int}`,
    /// external edges held at `lengths` (entries for internal edges ignored).
    pub fn integrate_top(&self, eps: f64, lengths: &[Length], f: &Tensor, method: Integration) -> Result<Tensor, FormError> {
        match method {
            Integration::Closed => {
                let (kernels, in_s) = self.closed_top_kernels(eps, lengths)?;
                self.contract(&kernels, &in_s, f)
            }
            Integration::Quadrature { rel_tol } => {
                let internal = self.graph.internal_edges();
                let (mut kernels, in_s) = self.closed_top_kernels(eps, lengths)?;
                let rank = self.graph.outgoing().len();
                let data = self.nested(&internal, 0, eps, rel_tol, &mut kernels, &in_s, f)?;
                Ok(Tensor {
                    dim: self.spec.dim(),
                    rank,
                    data,
                })
            }
        }
    }

    /// Edge kernels whose contraction is the closed-form top integral:
    /// `-P_eps` on internal edges, the usual kernels on external ones.
    pub fn closed_top_kernels(&self, eps: f64, lengths: &[Length]) -> Result<(Vec<Kernel2>, Vec<bool>), FormError> {
        let in_s: Vec<bool> = (0..self.graph.num_edges()).map(|e| self.graph.is_internal_edge(e)).collect();
        let (_, _, pk) = self.spec.green_homotopy(eps)?;
        let neg_p = Kernel2 {
            coeffs: -pk,
            parity: (self.spec.p() + 1) % 2,
        };
        let kernels = lengths
            .iter()
            .enumerate()
            .map(|(e, &l)| if in_s[e] { neg_p.clone() } else { self.edge_kernel(l, false, EdgeRole::Plain) })
            .collect();
        Ok((kernels, in_s))
    }

    #[allow(clippy::too_many_arguments)]
    fn nested(
        &self,
        internal: &[usize],
        level: usize,
        eps: f64,
        rel_tol: f64,
        kernels: &mut Vec<Kernel2>,
        in_s: &[bool],
        f: &Tensor,
    ) -> Result<Vec<C64>, FormError> {
        if level == internal.len() {
            return Ok(self.contract(kernels, in_s, f)?.data);
        }
        let e = internal[level];
        let mut failure = None;
        let mut integrand = |t: f64| -> Vec<C64> {
            kernels[e] = self.edge_kernel(Length::Finite(t), true, EdgeRole::Plain);
            let mut inner = kernels.clone();
            match self.nested(internal, level + 1, eps, rel_tol, &mut inner, in_s, f) {
                Ok(v) => v,
                Err(err) => {
                    failure = Some(err);
                    vec![ZERO; self.spec.dim().pow(self.graph.outgoing().len() as u32)]
                }
            }
        };
        let tol = if level == 0 { rel_tol } else { 0.1 * rel_tol };
        let res = crate::quadrature::integrate_to_infinity(&mut integrand, eps, 1e-13, tol, 400);
        if let Some(err) = failure {
            return Err(err);
        }
        res.map(|(v, _)| v).map_err(|e| match e {
            crate::quadrature::QuadratureError::NoConvergence { error, .. } => FormError::Quadrature(error),
        })
    }
}

//! The standard graph battery for the restriction, gluing and closedness
//! identities, shared by the command line and the acceptance suite.

use crate::forms::{closedness_check, gluing_check, restriction_check, subsets, Check, FormContext, FormError, Tensor};
use crate::linalg::{Vector, C64};
use crate::ribbon::{zoo, DetTrivialization, Length, RibbonGraph};
use crate::spectral::Spectral;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A composable pair `(left, right)`: outputs of `left` feed inputs of `right`.
pub struct GluingPair {
    pub name: String,
    pub left: RibbonGraph,
    pub right: RibbonGraph,
}

fn gluing_pairs() -> Vec<GluingPair> {
    let u = zoo::unit();
    let cor = zoo::corolla(2);
    let thl = zoo::theta_with_legs(false);
    let thp = zoo::theta_with_legs(true);
    let pair = |name: &str, left: RibbonGraph, right: RibbonGraph| GluingPair {
        name: name.into(),
        left,
        right,
    };
    vec![
        pair("unit-unit", u.clone(), u.clone()),
        pair("corolla-theta_legs", cor.clone(), thl.clone()),
        pair("theta_legs+unit-corolla", thl.disjoint_union(&u), cor.clone()),
        pair("corolla+unit-corolla", cor.disjoint_union(&u), cor.clone()),
        pair("theta_legs-theta_one_leg", thp.clone(), zoo::theta_one_leg()),
        pair("tree3-theta_legs", zoo::tree3(true), thp),
    ]
}

/// Named graphs of the battery: the zoo, edge contractions and composites.
pub fn lemma_graphs() -> Vec<(String, RibbonGraph)> {
    let mut out: Vec<(String, RibbonGraph)> = vec![
        ("theta_planar".into(), zoo::theta_planar()),
        ("theta_genus_one".into(), zoo::theta_genus_one()),
        ("dumbbell".into(), zoo::dumbbell()),
        ("corolla".into(), zoo::corolla(2)),
        ("tree3_left".into(), zoo::tree3(true)),
        ("tree3_right".into(), zoo::tree3(false)),
        ("theta_legs".into(), zoo::theta_with_legs(false)),
        ("theta_legs_planar".into(), zoo::theta_with_legs(true)),
        ("theta_one_leg".into(), zoo::theta_one_leg()),
    ];
    let contracted = [
        ("theta_planar/e0", zoo::theta_planar(), 0),
        ("dumbbell/bar", zoo::dumbbell(), 1),
        ("theta_legs/e1", zoo::theta_with_legs(false), 1),
        ("tree3/e0", zoo::tree3(true), 0),
    ];
    for (name, g, e) in contracted {
        out.push((name.into(), g.contract_edge(e).expect("battery edge contracts").graph));
    }
    for p in gluing_pairs().into_iter().skip(1) {
        out.push((format!("glued:{}", p.name), p.left.glue(&p.right).expect("battery pair composes").graph));
    }
    out
}

/// Worst residual of one identity, absolute and relative to the term size.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct LemmaResidual {
    pub residual: f64,
    pub relative: f64,
    /// Largest term size seen, to tell vanishing forms from small residuals.
    pub scale: f64,
    pub checks: usize,
}

impl LemmaResidual {
    fn absorb(&mut self, ch: Check) {
        self.residual = self.residual.max(ch.residual);
        self.relative = self.relative.max(ch.residual / ch.scale.max(1.0));
        self.scale = self.scale.max(ch.scale);
        self.checks += 1;
    }
    fn merge(&mut self, o: LemmaResidual) {
        self.residual = self.residual.max(o.residual);
        self.relative = self.relative.max(o.relative);
        self.scale = self.scale.max(o.scale);
        self.checks += o.checks;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub graphs: Vec<String>,
    pub gluing_pairs: Vec<String>,
    pub metric_points: usize,
    pub restriction: LemmaResidual,
    pub gluing: LemmaResidual,
    pub closedness: LemmaResidual,
}

impl LemmaReport {
    pub fn worst_relative(&self) -> f64 {
        self.restriction
            .relative
            .max(self.gluing.relative)
            .max(self.closedness.relative)
    }
}

pub fn random_vector(r: &mut impl Rng, n: usize) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))))
}

/// Sum of two random pure tensors of the given rank.
pub fn random_tensor(r: &mut impl Rng, n: usize, rank: usize) -> Tensor {
    let mut t = Tensor::from_vectors(n, &(0..rank).map(|_| random_vector(r, n)).collect::<Vec<_>>());
    t.add_assign(&Tensor::from_vectors(n, &(0..rank).map(|_| random_vector(r, n)).collect::<Vec<_>>()));
    t
}

pub fn random_trivialization(r: &mut impl Rng, g: &RibbonGraph) -> DetTrivialization {
    let mut t = g.default_trivialization();
    t.vertex_order.shuffle(r);
    t.edge_order.shuffle(r);
    for f in t.flipped.iter_mut() {
        *f = r.gen_bool(0.5);
    }
    t
}

fn random_lengths(r: &mut impl Rng, g: &RibbonGraph) -> Vec<Length> {
    (0..g.num_edges()).map(|_| Length::Finite(r.gen_range(0.2..1.5))).collect()
}

/// At most this many wedge subsets are sampled per check; smaller graphs
/// are checked on every subset.
const MAX_SUBSETS: usize = 32;

fn sampled_subsets(r: &mut impl Rng, items: &[usize]) -> Vec<Vec<usize>> {
    let all = subsets(items);
    if all.len() <= MAX_SUBSETS {
        return all;
    }
    // always keep the empty and the full subset
    let mut picked = vec![all[0].clone(), all[all.len() - 1].clone()];
    picked.extend(all[1..all.len() - 1].choose_multiple(r, MAX_SUBSETS - 2).cloned());
    picked
}

struct GraphJob<'g> {
    graph: &'g RibbonGraph,
    triv: DetTrivialization,
    lengths: Vec<Length>,
    input: Tensor,
    restrictions: Vec<(usize, Vec<usize>)>,
    closed: Vec<Vec<usize>>,
}

/// Runs every identity on every battery graph at `points` random metrics,
/// with random trivializations, inputs and wedge subsets drawn from `seed`.
pub fn run_lemmas(spec: &Spectral, points: usize, seed: u64) -> Result<LemmaReport, FormError> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.dim();
    let graphs = lemma_graphs();
    let pairs = gluing_pairs();
    let mut jobs = Vec::new();
    let mut glue_jobs = Vec::new();
    for _ in 0..points {
        for (_, g) in &graphs {
            let triv = random_trivialization(&mut r, g);
            let lengths = random_lengths(&mut r, g);
            let input = random_tensor(&mut r, n, g.incoming().len());
            let mut restrictions = Vec::new();
            for e in g.internal_edges().into_iter().filter(|&e| !g.is_loop(e)) {
                let others: Vec<usize> = (0..g.num_edges()).filter(|&x| x != e).collect();
                restrictions.extend(sampled_subsets(&mut r, &others).into_iter().map(|s| (e, s)));
            }
            let all: Vec<usize> = (0..g.num_edges()).collect();
            let closed = sampled_subsets(&mut r, &all);
            jobs.push(GraphJob {
                graph: g,
                triv,
                lengths,
                input,
                restrictions,
                closed,
            });
        }
        for p in &pairs {
            let t1 = random_trivialization(&mut r, &p.left);
            let t2 = random_trivialization(&mut r, &p.right);
            let l1 = random_lengths(&mut r, &p.left);
            let l2 = random_lengths(&mut r, &p.right);
            let f = random_tensor(&mut r, n, p.left.incoming().len());
            glue_jobs.push((p, t1, t2, l1, l2, f));
        }
    }
    let per_graph: Vec<(LemmaResidual, LemmaResidual)> = jobs
        .par_iter()
        .map(|j| {
            let mut res = LemmaResidual::default();
            for (e, s) in &j.restrictions {
                res.absorb(restriction_check(spec, j.graph, &j.triv, *e, &j.lengths, s, &j.input)?);
            }
            let ctx = FormContext::new(spec, j.graph.clone(), j.triv.clone())?;
            let mut clo = LemmaResidual::default();
            for s in &j.closed {
                clo.absorb(closedness_check(&ctx, &j.lengths, s, &j.input)?);
            }
            Ok((res, clo))
        })
        .collect::<Result<_, FormError>>()?;
    let glued: Vec<Check> = glue_jobs
        .par_iter()
        .map(|(p, t1, t2, l1, l2, f)| gluing_check(spec, &p.left, t1, &p.right, t2, l1, l2, f))
        .collect::<Result<_, _>>()?;
    let mut restriction = LemmaResidual::default();
    let mut closedness = LemmaResidual::default();
    for (a, b) in per_graph {
        restriction.merge(a);
        closedness.merge(b);
    }
    let mut gluing = LemmaResidual::default();
    for ch in glued {
        gluing.absorb(ch);
    }
    Ok(LemmaReport {
        graphs: graphs.into_iter().map(|(s, _)| s).collect(),
        gluing_pairs: pairs.into_iter().map(|p| p.name).collect(),
        metric_points: points,
        restriction,
        gluing,
        closedness,
    })
}

//! Shared test helpers: a brute-force form evaluator and random inputs.
#![allow(dead_code)]


pub mod enumeration;
use cyheat::forms::Tensor;
use cyheat::linalg::{Vector, C64, ONE, ZERO};
use cyheat::ribbon::{DetTrivialization, RibbonGraph};
use cyheat::{CyAlgebra, Kernel2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Key {
    T(usize),
    Dl(usize),
    D(usize),
    F(usize),
}

fn koszul(seq: &[(Key, u8)], target: &[Key]) -> f64 {
    let pos: Vec<usize> = target
        .iter()
        .map(|k| seq.iter().position(|(x, _)| x == k).unwrap())
        .collect();
    let mut odd = 0;
    for a in 0..pos.len() {
        for b in a + 1..pos.len() {
            if pos[a] > pos[b] {
                odd += (seq[pos[a]].1 & seq[pos[b]].1) as usize;
            }
        }
    }
    if odd % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn trace_of(alg: &CyAlgebra, idx: &[usize]) -> C64 {
    let n = alg.dim();
    let mut v = cyheat::linalg::basis_vector(n, idx[0]);
    for &a in &idx[1..] {
        v = alg.multiply(&v, &cyheat::linalg::basis_vector(n, a));
    }
    alg.trace(&v)
}

/// Direct expansion over every basis assignment of the full super sequence.
pub fn brute_force(
    alg: &CyAlgebra,
    g: &RibbonGraph,
    t: &DetTrivialization,
    kernels: &[Kernel2],
    in_s: &[bool],
    f: &Tensor,
) -> Tensor {
    let n = alg.dim();
    let p = alg.p();
    let par = alg.parity();
    let nz: Vec<Vec<(usize, usize, C64)>> = kernels
        .iter()
        .map(|k| {
            let mut v = vec![];
            for i in 0..n {
                for j in 0..n {
                    if k.coeffs[(i, j)].norm() > 0.0 {
                        v.push((i, j, k.coeffs[(i, j)]));
                    }
                }
            }
            v
        })
        .collect();
    let fnz: Vec<(usize, C64)> = f.data.iter().cloned().enumerate().filter(|(_, z)| z.norm() > 0.0).collect();
    let mut out = Tensor::zeros(n, g.outgoing().len());
    let ne = g.num_edges();
    let mut choice = vec![0usize; ne];
    let mut s_sorted: Vec<usize> = (0..ne).filter(|&e| in_s[e]).collect();
    s_sorted.sort();
    if nz.iter().any(|v| v.is_empty()) {
        return out;
    }
    loop {
        for &(fix, fz) in &fnz {
            let mut coef = fz;
            let mut val = vec![0usize; g.num_darts()];
            let mut seq: Vec<(Key, u8)> = t.vertex_order.iter().map(|&v| (Key::T(v), p)).collect();
            for &e in &t.edge_order {
                let (i, j, z) = nz[e][choice[e]];
                coef *= z;
                let [h0, h1] = g.oriented(e, t);
                if in_s[e] {
                    seq.push((Key::Dl(e), 1));
                }
                seq.push((Key::D(h0), par[i]));
                seq.push((Key::D(h1), par[j]));
                val[h0] = i;
                val[h1] = j;
            }
            let mut fval = vec![0usize; f.rank];
            let mut x = fix;
            for k in (0..f.rank).rev() {
                fval[k] = x % n;
                x /= n;
            }
            for (k, &b) in fval.iter().enumerate() {
                seq.push((Key::F(k), par[b]));
            }
            let mut target: Vec<Key> = s_sorted.iter().map(|&e| Key::Dl(e)).collect();
            for &v in &t.vertex_order {
                target.push(Key::T(v));
                let (keys, idx): (Vec<Key>, Vec<usize>) = if let Some(i) = g.incoming().iter().position(|&x| x == v) {
                    let h = g.external_dart(v);
                    (vec![Key::D(h), Key::F(i)], vec![val[h], fval[i]])
                } else {
                    (
                        g.vertices()[v].iter().map(|&h| Key::D(h)).collect(),
                        g.vertices()[v].iter().map(|&h| val[h]).collect(),
                    )
                };
                target.extend(keys);
                coef *= trace_of(alg, &idx);
            }
            if coef == ZERO {
                continue;
            }
            let outs: Vec<usize> = g.outgoing().iter().map(|&v| g.external_dart(v)).collect();
            target.extend(outs.iter().map(|&h| Key::D(h)));
            let oix = outs.iter().fold(0, |acc, &h| acc * n + val[h]);
            out.data[oix] += coef * koszul(&seq, &target);
        }
        // advance the odometer
        let mut e = 0;
        loop {
            if e == ne {
                return out;
            }
            choice[e] += 1;
            if choice[e] < nz[e].len() {
                break;
            }
            choice[e] = 0;
            e += 1;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(r: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))))
}

pub fn random_tensor(r: &mut ChaCha8Rng, n: usize, rank: usize) -> Tensor {
    let vs: Vec<Vector> = (0..rank).map(|_| random_vector(r, n)).collect();
    let mut t = Tensor::from_vectors(n, &vs);
    // add a second product term so inputs are not pure tensors
    let ws: Vec<Vector> = (0..rank).map(|_| random_vector(r, n)).collect();
    t.add_assign(&Tensor::from_vectors(n, &ws));
    t
}

pub fn random_trivialization(r: &mut ChaCha8Rng, g: &RibbonGraph) -> DetTrivialization {
    let mut t = g.default_trivialization();
    t.vertex_order.shuffle(r);
    t.edge_order.shuffle(r);
    for f in t.flipped.iter_mut() {
        *f = r.gen_bool(0.5);
    }
    t
}

pub fn one(n: usize) -> Tensor {
    Tensor::scalar(n, ONE)
}

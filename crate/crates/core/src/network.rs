//! Super tensor networks: ordered lists of slots over a Z/2-graded basis,
//! contracted pairwise with Koszul signs.
//!
//! Every slot ranges over the same graded basis. A dual slot pairs with its
//! primal slot only when the dual sits immediately to the left; any other
//! arrangement is first reached by moving the primal slot, picking up
//! `(-1)^{|x||z|}` for each slot `z` it passes.

use crate::linalg::{C64, ZERO};
use std::collections::HashMap;

/// Label of a tensor slot. `Co*` slots are dual to their plain counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Dart(usize),
    CoDart(usize),
    Input(usize),
    CoInput(usize),
}

impl Slot {
    fn partner(self) -> Slot {
        match self {
            Slot::Dart(h) => Slot::CoDart(h),
            Slot::CoDart(h) => Slot::Dart(h),
            Slot::Input(i) => Slot::CoInput(i),
            Slot::CoInput(i) => Slot::Input(i),
        }
    }
    fn is_dual(self) -> bool {
        matches!(self, Slot::CoDart(_) | Slot::CoInput(_))
    }
}

/// Dense tensor whose slots are laid out row-major (first slot slowest).
#[derive(Debug, Clone)]
pub struct Network<'a> {
    parity: &'a [u8],
    slots: Vec<Slot>,
    data: Vec<C64>,
}

fn digits(mut ix: usize, n: usize, rank: usize, out: &mut [usize]) {
    for k in (0..rank).rev() {
        out[k] = ix % n;
        ix /= n;
    }
}

impl<'a> Network<'a> {
    pub fn scalar(parity: &'a [u8], z: C64) -> Self {
        Network {
            parity,
            slots: vec![],
            data: vec![z],
        }
    }

    fn dim(&self) -> usize {
        self.parity.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn scale(&mut self, z: C64) {
        self.data.iter_mut().for_each(|x| *x *= z);
    }

    /// Appends a block on the right and contracts every slot of it whose
    /// partner is already present.
    pub fn absorb(&mut self, slots: &[Slot], data: &[C64]) {
        let n = self.dim();
        let nx = self.slots.len();
        let ny = slots.len();
        let combined: Vec<Slot> = self.slots.iter().chain(slots).cloned().collect();
        let mut pairs = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                if combined[i].partner() == slots[j] {
                    pairs.push((i, nx + j));
                }
            }
        }
        // simulate the moves and record the Koszul sign pairs
        let mut seq: Vec<usize> = (0..nx + ny).collect();
        let mut sign_pairs = Vec::new();
        for &(i, j) in &pairs {
            let (dual, prim) = if combined[i].is_dual() { (i, j) } else { (j, i) };
            let pd = seq.iter().position(|&x| x == dual).unwrap();
            let pp = seq.iter().position(|&x| x == prim).unwrap();
            let passed = if pp > pd { &seq[pd + 1..pp] } else { &seq[pp + 1..=pd] };
            sign_pairs.extend(passed.iter().map(|&z| (prim, z)));
            seq.retain(|&x| x != dual && x != prim);
        }
        let x_contracted: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let y_contracted: Vec<usize> = pairs.iter().map(|p| p.1 - nx).collect();
        let x_rest: Vec<usize> = (0..nx).filter(|i| !x_contracted.contains(i)).collect();
        let y_rest: Vec<usize> = (0..ny).filter(|j| !y_contracted.contains(j)).collect();
        let y_rest_size = n.pow(y_rest.len() as u32);
        let out_slots: Vec<Slot> = seq.iter().map(|&k| combined[k]).collect();
        let mut out = vec![ZERO; n.pow(out_slots.len() as u32)];

        // group nonzero block entries by their contracted digits
        let mut groups: HashMap<usize, Vec<(usize, Vec<usize>, C64)>> = HashMap::new();
        let mut dy = vec![0; ny];
        for (iy, &v) in data.iter().enumerate() {
            if v == ZERO {
                continue;
            }
            digits(iy, n, ny, &mut dy);
            let key = y_contracted.iter().fold(0, |acc, &j| acc * n + dy[j]);
            let rest = y_rest.iter().fold(0, |acc, &j| acc * n + dy[j]);
            groups.entry(key).or_default().push((rest, dy.clone(), v));
        }
        let mut dx = vec![0; nx];
        let mut full = vec![0; nx + ny];
        for (ix, &u) in self.data.iter().enumerate() {
            if u == ZERO {
                continue;
            }
            digits(ix, n, nx, &mut dx);
            let key = x_contracted.iter().fold(0, |acc, &i| acc * n + dx[i]);
            let Some(list) = groups.get(&key) else { continue };
            let rest_x = x_rest.iter().fold(0, |acc, &i| acc * n + dx[i]);
            full[..nx].copy_from_slice(&dx);
            for (rest_y, dyv, v) in list {
                full[nx..].copy_from_slice(dyv);
                let odd = sign_pairs
                    .iter()
                    .filter(|&&(a, b)| self.parity[full[a]] & self.parity[full[b]] == 1)
                    .count();
                let term = u * v;
                out[rest_x * y_rest_size + rest_y] += if odd % 2 == 0 { term } else { -term };
            }
        }
        self.slots = out_slots;
        self.data = out;
    }

    /// Dense data with slots permuted into `order`, with Koszul signs.
    pub fn into_order(self, order: &[Slot]) -> Vec<C64> {
        let n = self.dim();
        let r = self.slots.len();
        assert_eq!(r, order.len());
        let target: Vec<usize> = self
            .slots
            .iter()
            .map(|s| order.iter().position(|o| o == s).expect("slot present"))
            .collect();
        let mut out = vec![ZERO; self.data.len()];
        let mut d = vec![0; r];
        for (ix, &z) in self.data.iter().enumerate() {
            if z == ZERO {
                continue;
            }
            digits(ix, n, r, &mut d);
            let mut odd = 0;
            for a in 0..r {
                for b in a + 1..r {
                    if target[a] > target[b] {
                        odd += (self.parity[d[a]] & self.parity[d[b]]) as usize;
                    }
                }
            }
            let mut j = 0;
            for t in 0..r {
                let a = target.iter().position(|&x| x == t).unwrap();
                j = j * n + d[a];
            }
            out[j] = if odd % 2 == 0 { z } else { -z };
        }
        out
    }
}

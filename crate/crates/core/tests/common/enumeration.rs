//! Brute-force isomorph oracle for trivalent ribbon graphs with labelled legs.
//!
//! Vertex `v` owns darts `3v, 3v+1, 3v+2` in cyclic order; leg `i` is the
//! single dart `3V + i`. Every perfect matching in which legs pair with
//! vertex darts is a labelled structure. The relabelling group
//! `S_V ⋉ Z_3^V` has order `V! 3^V`, so a class with `c` labelled structures
//! has `|Aut| = V! 3^V / c`.
//!
//! With legs present only structures where leg 0 meets dart 0 are listed:
//! the group is transitive on vertex darts, so each class keeps exactly a
//! `1/(3V)` share of its structures.

use std::collections::{BTreeMap, VecDeque};

struct Structure {
    v: usize,
    n: usize,
    partner: Vec<usize>,
}

impl Structure {
    fn next_around(&self, h: usize) -> usize {
        if h >= 3 * self.v {
            h
        } else {
            3 * (h / 3) + (h % 3 + 1) % 3
        }
    }

    fn node(&self, h: usize) -> usize {
        if h >= 3 * self.v {
            self.v + (h - 3 * self.v)
        } else {
            h / 3
        }
    }

    fn connected(&self) -> bool {
        let nodes = self.v + self.n;
        let mut parent: Vec<usize> = (0..nodes).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for h in 0..self.partner.len() {
            let (a, b) = (find(&mut parent, self.node(h)), find(&mut parent, self.node(self.partner[h])));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..nodes).all(|x| find(&mut parent, x) == root)
    }

    fn genus_boundaries(&self) -> (usize, usize) {
        let darts = self.partner.len();
        let mut seen = vec![false; darts];
        let mut faces = 0;
        for s in 0..darts {
            if seen[s] {
                continue;
            }
            faces += 1;
            let mut h = s;
            while !seen[h] {
                seen[h] = true;
                h = self.next_around(self.partner[h]);
            }
        }
        let chi = (self.v + self.n) as i64 - (darts / 2) as i64;
        (((2 - chi - faces as i64) / 2) as usize, faces)
    }

    fn code_from(&self, start: usize) -> Vec<usize> {
        let darts = self.partner.len();
        let mut num = vec![usize::MAX; darts];
        let mut order = vec![start];
        num[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(h) = queue.pop_front() {
            for x in [self.partner[h], self.next_around(h)] {
                if num[x] == usize::MAX {
                    num[x] = order.len();
                    order.push(x);
                    queue.push_back(x);
                }
            }
        }
        order
            .iter()
            .flat_map(|&h| {
                let leg = if h >= 3 * self.v { 1 + h - 3 * self.v } else { 0 };
                [num[self.partner[h]], num[self.next_around(h)], leg]
            })
            .collect()
    }

    fn canonical(&self) -> Vec<usize> {
        if self.n > 0 {
            self.code_from(3 * self.v)
        } else {
            (0..3 * self.v).map(|s| self.code_from(s)).min().unwrap()
        }
    }
}

fn matchings(partner: &mut Vec<usize>, v: usize, visit: &mut dyn FnMut(&[usize])) {
    let Some(h) = partner.iter().position(|&x| x == usize::MAX) else {
        visit(partner);
        return;
    };
    for k in h + 1..partner.len() {
        // legs never pair with legs
        if partner[k] != usize::MAX || (h >= 3 * v && k >= 3 * v) {
            continue;
        }
        partner[h] = k;
        partner[k] = h;
        matchings(partner, v, visit);
        partner[h] = usize::MAX;
        partner[k] = usize::MAX;
    }
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Sorted automorphism orders of all classes of connected trivalent graphs
/// with `v` vertices, genus `g`, `h` boundaries and `n` labelled legs.
pub fn brute_force_classes(v: usize, g: usize, h: usize, n: usize) -> Vec<usize> {
    let darts = 3 * v + n;
    if darts % 2 == 1 || v == 0 {
        return vec![];
    }
    let mut partner = vec![usize::MAX; darts];
    if n > 0 {
        partner[3 * v] = 0;
        partner[0] = 3 * v;
    }
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    matchings(&mut partner, v, &mut |p| {
        let s = Structure { v, n, partner: p.to_vec() };
        if s.connected() && s.genus_boundaries() == (g, h) {
            *counts.entry(s.canonical()).or_default() += 1;
        }
    });
    let group = factorial(v) * 3usize.pow(v as u32) / if n > 0 { 3 * v } else { 1 };
    let mut auts: Vec<usize> = counts
        .values()
        .map(|&c| {
            assert_eq!(group % c, 0, "orbit size divides the group order");
            group / c
        })
        .collect();
    auts.sort_unstable();
    auts
}

/// Every stable `(g, h, n)` with between 1 and `max_v` trivalent vertices.
pub fn signatures(max_v: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = vec![];
    for g in 0..=max_v {
        for h in 1..=max_v + 2 {
            for n in 0..=max_v + 2 {
                let v = 4 * g as i64 - 4 + 2 * h as i64 + n as i64;
                if v >= 1 && v <= max_v as i64 {
                    out.push((v as usize, g, h, n));
                }
            }
        }
    }
    out
}

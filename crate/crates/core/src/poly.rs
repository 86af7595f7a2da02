//! Polynomials in commuting and anticommuting variables.
//!
//! A monomial is a nondecreasing list of variable indices; an odd variable
//! appears at most once. Products reorder factors with Koszul signs.

use crate::linalg::{C64, ZERO};
use std::collections::BTreeMap;

pub type Monomial = Vec<u16>;

/// Variable parities shared by every polynomial of the ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    parity: Vec<u8>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, C64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }
    pub fn constant(z: C64) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![], z);
        p
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add_term(&mut self, m: Monomial, z: C64) {
        if z == ZERO {
            return;
        }
        let e = self.terms.entry(m).or_insert(ZERO);
        *e += z;
    }
    pub fn add_assign(&mut self, other: &Poly) {
        for (m, &z) in &other.terms {
            self.add_term(m.clone(), z);
        }
    }
    pub fn scaled(&self, z: C64) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, &w)| (m.clone(), w * z)).collect(),
        }
    }
    pub fn coefficient(&self, m: &[u16]) -> C64 {
        self.terms.get(m).copied().unwrap_or(ZERO)
    }
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, z| acc.max(z.norm()))
    }
    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filtered(&self, keep: impl Fn(&[u16]) -> bool) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, &z)| (m.clone(), z))
                .collect(),
        }
    }
}

impl Ring {
    pub fn new(parity: Vec<u8>) -> Self {
        Ring { parity }
    }
    pub fn num_vars(&self) -> usize {
        self.parity.len()
    }
    pub fn parity_of(&self, v: u16) -> u8 {
        self.parity[v as usize]
    }
    pub fn monomial_parity(&self, m: &[u16]) -> u8 {
        m.iter().map(|&v| self.parity_of(v)).sum::<u8>() % 2
    }

    pub fn var(&self, v: u16) -> Poly {
        let mut p = Poly::zero();
        p.add_term(vec![v], C64::new(1.0, 0.0));
        p
    }

    /// Product of monomials with the sign from sorting odd factors, or
    /// `None` when an odd variable repeats.
    pub fn monomial_mul(&self, a: &[u16], b: &[u16]) -> Option<(Monomial, bool)> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut odd_swaps = 0usize;
        let (mut i, mut j) = (0, 0);
        // odd factors of `a` not yet emitted
        let mut odd_left_in_a = a.iter().filter(|&&v| self.parity_of(v) == 1).count();
        while i < a.len() || j < b.len() {
            let take_a = j == b.len() || (i < a.len() && a[i] <= b[j]);
            if take_a {
                if self.parity_of(a[i]) == 1 {
                    if j < b.len() && b[j] == a[i] {
                        return None;
                    }
                    odd_left_in_a -= 1;
                }
                out.push(a[i]);
                i += 1;
            } else {
                if self.parity_of(b[j]) == 1 {
                    odd_swaps += odd_left_in_a;
                }
                out.push(b[j]);
                j += 1;
            }
        }
        Some((out, odd_swaps % 2 == 1))
    }

    pub fn mul(&self, x: &Poly, y: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, &za) in &x.terms {
            for (mb, &zb) in &y.terms {
                if let Some((m, neg)) = self.monomial_mul(ma, mb) {
                    let z = za * zb;
                    out.add_term(m, if neg { -z } else { z });
                }
            }
        }
        out
    }

    /// Product keeping only monomials accepted by `keep`.
    pub fn mul_truncated(&self, x: &Poly, y: &Poly, keep: impl Fn(&[u16]) -> bool) -> Poly {
        let mut out = Poly::zero();
        for (ma, &za) in &x.terms {
            for (mb, &zb) in &y.terms {
                if let Some((m, neg)) = self.monomial_mul(ma, mb) {
                    if keep(&m) {
                        let z = za * zb;
                        out.add_term(m, if neg { -z } else { z });
                    }
                }
            }
        }
        out
    }

    /// Left derivative of a monomial: `(sign, remaining monomial, multiplicity)`.
    pub fn monomial_derivative(&self, v: u16, m: &[u16]) -> Option<(Monomial, f64)> {
        let pos = m.iter().position(|&x| x == v)?;
        let mult = m.iter().filter(|&&x| x == v).count();
        let mut rest = m.to_vec();
        rest.remove(pos);
        let coeff = if self.parity_of(v) == 1 {
            let before = m[..pos].iter().filter(|&&x| self.parity_of(x) == 1).count();
            if before % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        } else {
            mult as f64
        };
        Some((rest, coeff))
    }

    pub fn derivative(&self, v: u16, x: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, &z) in &x.terms {
            if let Some((rest, k)) = self.monomial_derivative(v, m) {
                out.add_term(rest, z * k);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn odd_variables_anticommute() {
        let r = Ring::new(vec![1, 1, 0]);
        let xy = r.mul(&r.var(0), &r.var(1));
        let yx = r.mul(&r.var(1), &r.var(0));
        assert_eq!(xy.scaled(c(-1.0)), yx);
        assert!(r.mul(&r.var(0), &r.var(0)).is_zero());
        let zz = r.mul(&r.var(2), &r.var(2));
        assert_eq!(zz.coefficient(&[2, 2]), c(1.0));
    }

    #[test]
    fn left_derivative_signs() {
        let r = Ring::new(vec![1, 1, 0]);
        let m = r.mul(&r.mul(&r.var(0), &r.var(1)), &r.mul(&r.var(2), &r.var(2)));
        let d1 = r.derivative(1, &m);
        assert_eq!(d1.coefficient(&[0, 2, 2]), c(-1.0));
        let d2 = r.derivative(2, &m);
        assert_eq!(d2.coefficient(&[0, 1, 2]), c(2.0));
    }
}

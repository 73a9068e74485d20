//! Sparse multivariate polynomials over F_q in the graded chart variables.
//! The u-adic grading places a variable of u-index i in weight i; alternative
//! weight tables are passed as closures.

use crate::ring::{FieldCtx, Fq};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    X,
    Y,
    Z,
    Ya,
    Yb,
    Yg,
}

/// A chart variable: kind, embedding index, u-adic index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub tau: u16,
    pub idx: u16,
}

impl Var {
    pub fn new(kind: VarKind, tau: usize, idx: i64) -> Var {
        Var {
            kind,
            tau: tau as u16,
            idx: u16::try_from(idx).expect("variable index out of range"),
        }
    }

    /// Weight under the u-adic grading.
    pub fn u_weight(&self) -> i64 {
        self.idx as i64
    }
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let k = match self.kind {
            VarKind::X => "x",
            VarKind::Y => "y",
            VarKind::Z => "z",
            VarKind::Ya => "Ya",
            VarKind::Yb => "Yb",
            VarKind::Yg => "Yg",
        };
        write!(f, "{k}[{},{}]", self.tau, self.idx)
    }
}

/// Sorted list of (variable, exponent) pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Var, u8)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for &(v, e) in &other.0 {
            match out.binary_search_by_key(&v, |&(w, _)| w) {
                Ok(pos) => out[pos].1 += e,
                Err(pos) => out.insert(pos, (v, e)),
            }
        }
        Monomial(out)
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u8)> + '_ {
        self.0.iter().copied()
    }

    pub fn degree_in(&self, v: Var) -> u8 {
        self.0
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|pos| self.0[pos].1)
            .unwrap_or(0)
    }

    pub fn weight(&self, w: &dyn Fn(Var) -> i64) -> i64 {
        self.0.iter().map(|&(v, e)| w(v) * e as i64).sum()
    }

    /// Remove v and return the remaining monomial with v's exponent.
    fn split_off(&self, v: Var) -> (u8, Monomial) {
        let mut rest = self.0.clone();
        match rest.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(pos) => {
                let e = rest.remove(pos).1;
                (e, Monomial(rest))
            }
            Err(_) => (0, Monomial(rest)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Fq>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: Fq) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(v: Var) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), Fq::ONE);
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Fq)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, f: &FieldCtx, m: Monomial, c: Fq) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, f: &FieldCtx, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.insert(f, m.clone(), c);
        }
        out
    }

    pub fn sub(&self, f: &FieldCtx, other: &Poly) -> Poly {
        self.add(f, &other.scale(f, f.neg(Fq::ONE)))
    }

    pub fn scale(&self, f: &FieldCtx, c: Fq) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, &v)| (m.clone(), f.mul(v, c)))
                .collect(),
        }
    }

    pub fn mul(&self, f: &FieldCtx, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.insert(f, ma.mul(mb), f.mul(ca, cb));
            }
        }
        out
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().map(|(v, _)| v))
            .collect()
    }

    pub fn eval(&self, f: &FieldCtx, assign: &dyn Fn(Var) -> Fq) -> Fq {
        let mut acc = Fq::ZERO;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (v, e) in m.vars() {
                for _ in 0..e {
                    t = f.mul(t, assign(v));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Substitute v by the given polynomial.
    pub fn substitute(&self, f: &FieldCtx, v: Var, expr: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, &c) in &self.terms {
            let (e, rest) = m.split_off(v);
            if e == 0 {
                out.insert(f, m.clone(), c);
                continue;
            }
            let mut piece = Poly {
                terms: {
                    let mut t = BTreeMap::new();
                    t.insert(rest, c);
                    t
                },
            };
            for _ in 0..e {
                piece = piece.mul(f, expr);
            }
            out = out.add(f, &piece);
        }
        out
    }

    /// The linear coefficient of v, provided v only occurs linearly and in
    /// monomials not involving other variables mixed with it nonlinearly.
    /// Returns (coefficient-poly-in-other-vars, rest) with
    /// self = coeff * v + rest.
    pub fn extract_linear(&self, f: &FieldCtx, v: Var) -> Option<(Poly, Poly)> {
        let mut coeff = Poly::zero();
        let mut rest = Poly::zero();
        for (m, &c) in &self.terms {
            let (e, r) = m.split_off(v);
            match e {
                0 => rest.insert(f, m.clone(), c),
                1 => coeff.insert(f, r, c),
                _ => return None,
            }
        }
        Some((coeff, rest))
    }

    pub fn max_weight(&self, w: &dyn Fn(Var) -> i64) -> Option<i64> {
        self.terms.keys().map(|m| m.weight(w)).max()
    }
}

/// Sum of the terms of highest weight; idempotent by construction.
pub fn leading_terms(poly: &Poly, w: &dyn Fn(Var) -> i64) -> Poly {
    let Some(top) = poly.max_weight(w) else {
        return Poly::zero();
    };
    Poly {
        terms: poly
            .terms
            .iter()
            .filter(|(m, _)| m.weight(w) == top)
            .map(|(m, &c)| (m.clone(), c))
            .collect(),
    }
}

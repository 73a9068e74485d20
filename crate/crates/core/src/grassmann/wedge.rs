//! Exterior algebra coordinates on V_h, indexed by strictly increasing label
//! tuples, with the duality pairing against the fixed top form
//! y_0 ^ ... ^ y_{dh-1}.

use crate::ring::{FieldCtx, Fq};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeVector {
    /// Ambient dimension d*h.
    pub n: usize,
    /// Homogeneous degree.
    pub k: usize,
    coords: BTreeMap<Vec<u8>, Fq>,
}

impl WedgeVector {
    pub fn zero(n: usize, k: usize) -> Self {
        WedgeVector {
            n,
            k,
            coords: BTreeMap::new(),
        }
    }

    pub fn basis(n: usize, labels: &[u8]) -> Self {
        let mut sorted = labels.to_vec();
        sorted.sort_unstable();
        let mut coords = BTreeMap::new();
        coords.insert(sorted, Fq::ONE);
        WedgeVector {
            n,
            k: labels.len(),
            coords,
        }
    }

    pub fn from_vector(n: usize, v: &[Fq]) -> Self {
        let mut coords = BTreeMap::new();
        for (i, &c) in v.iter().enumerate() {
            if !c.is_zero() {
                coords.insert(vec![i as u8], c);
            }
        }
        WedgeVector { n, k: 1, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> impl Iterator<Item = (&Vec<u8>, Fq)> {
        self.coords.iter().map(|(k, &v)| (k, v))
    }

    pub fn support(&self) -> Vec<Vec<u8>> {
        self.coords.keys().cloned().collect()
    }

    pub fn coeff(&self, labels: &[u8]) -> Fq {
        self.coords.get(labels).copied().unwrap_or(Fq::ZERO)
    }

    fn insert(&mut self, f: &FieldCtx, labels: Vec<u8>, c: Fq) {
        if c.is_zero() {
            return;
        }
        let entry = self.coords.entry(labels);
        match entry {
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

    pub fn add(&self, f: &FieldCtx, other: &Self) -> Self {
        assert_eq!((self.n, self.k), (other.n, other.k));
        let mut out = self.clone();
        for (labels, c) in &other.coords {
            out.insert(f, labels.clone(), *c);
        }
        out
    }

    pub fn sub(&self, f: &FieldCtx, other: &Self) -> Self {
        self.add(f, &other.scale(f, f.neg(Fq::ONE)))
    }

    pub fn scale(&self, f: &FieldCtx, c: Fq) -> Self {
        if c.is_zero() {
            return WedgeVector::zero(self.n, self.k);
        }
        WedgeVector {
            n: self.n,
            k: self.k,
            coords: self
                .coords
                .iter()
                .map(|(l, &v)| (l.clone(), f.mul(v, c)))
                .collect(),
        }
    }

    /// Wedge on the right with a plain vector of V_h.
    pub fn wedge_vector(&self, f: &FieldCtx, v: &[Fq]) -> Self {
        let mut out = WedgeVector::zero(self.n, self.k + 1);
        for (labels, &c) in &self.coords {
            for (i, &vc) in v.iter().enumerate() {
                if vc.is_zero() {
                    continue;
                }
                let i = i as u8;
                if labels.contains(&i) {
                    continue;
                }
                // sign: insert i into the sorted tuple
                let pos = labels.partition_point(|&l| l < i);
                let sign_neg = (labels.len() - pos) % 2 == 1;
                let mut nl = labels.clone();
                nl.insert(pos, i);
                let mut coef = f.mul(c, vc);
                if sign_neg {
                    coef = f.neg(coef);
                }
                out.insert(f, nl, coef);
            }
        }
        out
    }

    /// Scale so that the first (lexicographic) nonzero coordinate is 1.
    pub fn normalized(&self, f: &FieldCtx) -> Self {
        match self.coords.iter().next() {
            None => self.clone(),
            Some((_, &lead)) => self.scale(f, f.inv(lead).unwrap()),
        }
    }

    pub fn proportional_to(&self, f: &FieldCtx, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.normalized(f) == other.normalized(f)
    }

    /// Pairing into the trivialized determinant: the coefficient of the full
    /// wedge y_0 ^ ... ^ y_{n-1} in self ^ other.
    pub fn pair_det(&self, f: &FieldCtx, other: &Self) -> Fq {
        assert_eq!(self.n, other.n);
        assert_eq!(self.k + other.k, self.n);
        let mut acc = Fq::ZERO;
        for (a, &ca) in &self.coords {
            for (b, &cb) in &other.coords {
                if a.iter().any(|x| b.contains(x)) {
                    continue;
                }
                // sign of the shuffle sorting a ++ b
                let mut inv = 0usize;
                for &x in a {
                    inv += b.iter().filter(|&&y| y < x).count();
                }
                let mut c = f.mul(ca, cb);
                if inv % 2 == 1 {
                    c = f.neg(c);
                }
                acc = f.add(acc, c);
            }
        }
        acc
    }

    /// Leibniz extension of a linear endomorphism of V_h given on basis
    /// labels: D(w_1 ^ ... ^ w_k) = sum_i w_1 ^ ... ^ D(w_i) ^ ... ^ w_k.
    pub fn apply_derivation(&self, f: &FieldCtx, act: &[Vec<Fq>]) -> Self {
        let mut out = WedgeVector::zero(self.n, self.k);
        for (labels, &c) in &self.coords {
            for (slot, &lab) in labels.iter().enumerate() {
                for target in 0..self.n {
                    let m = act[target][lab as usize];
                    if m.is_zero() {
                        continue;
                    }
                    let t = target as u8;
                    if labels.iter().any(|&x| x == t && x != lab) {
                        continue;
                    }
                    // replace position `slot` by t, resort, track sign
                    let mut nl = labels.clone();
                    nl.remove(slot);
                    let pos = nl.partition_point(|&l| l < t);
                    let swaps = if pos > slot { pos - slot } else { slot - pos };
                    nl.insert(pos, t);
                    if nl.windows(2).any(|w| w[0] == w[1]) {
                        continue;
                    }
                    let mut coef = f.mul(c, m);
                    if swaps % 2 == 1 {
                        coef = f.neg(coef);
                    }
                    out.insert(f, nl, coef);
                }
            }
        }
        out
    }

    /// Loop-rotation weight of a label tuple under y_{jd+i} -> weight j.
    pub fn gm_weight(labels: &[u8], d: usize) -> i64 {
        labels.iter().map(|&l| (l as usize / d) as i64).sum()
    }

    /// Multiplicative extension of a linear map on V_h:
    /// g(w_1 ^ ... ^ w_k) = g(w_1) ^ ... ^ g(w_k).
    pub fn apply_linear(&self, f: &FieldCtx, act: &[Vec<Fq>]) -> Self {
        let n = self.n;
        let mut out = WedgeVector::zero(n, self.k);
        for (labels, &c) in &self.coords {
            // wedge the images of the factors
            let mut acc = WedgeVector {
                n,
                k: 0,
                coords: {
                    let mut m = BTreeMap::new();
                    m.insert(Vec::new(), c);
                    m
                },
            };
            for &lab in labels {
                let img: Vec<Fq> = (0..n).map(|t| act[t][lab as usize]).collect();
                acc = acc.wedge_vector(f, &img);
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(f, &acc);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldCtx {
        FieldCtx::new(5, 1).unwrap()
    }

    #[test]
    fn gm_weight_examples() {
        assert_eq!(WedgeVector::gm_weight(&[0, 1, 2], 3), 0);
        assert_eq!(WedgeVector::gm_weight(&[3, 4, 5], 3), 3);
        assert_eq!(WedgeVector::gm_weight(&[0, 1, 5], 3), 1);
    }

    #[test]
    fn wedge_antisymmetry() {
        let f = f5();
        let mut v = vec![Fq::ZERO; 6];
        v[0] = Fq::ONE;
        v[1] = f.from_int(2);
        let w = WedgeVector::from_vector(6, &v);
        assert!(w.wedge_vector(&f, &v).is_zero());
    }

    #[test]
    fn pair_det_sign() {
        let f = f5();
        let a = WedgeVector::basis(6, &[0, 1, 2]);
        let b = WedgeVector::basis(6, &[3, 4, 5]);
        assert_eq!(a.pair_det(&f, &b), Fq::ONE);
        // swapping one label across introduces a sign
        let a2 = WedgeVector::basis(6, &[0, 1, 3]);
        let b2 = WedgeVector::basis(6, &[2, 4, 5]);
        assert_eq!(a2.pair_det(&f, &b2), f.neg(Fq::ONE));
    }

    #[test]
    fn derivation_leibniz_on_pure_weight() {
        let f = f5();
        // scalar weight action: y_{jd+i} -> j y_{jd+i}
        let act: Vec<Vec<Fq>> = (0..6)
            .map(|l| {
                let mut row = vec![Fq::ZERO; 6];
                row[l] = f.from_int((l / 3) as i64);
                row
            })
            .collect();
        let w = WedgeVector::basis(6, &[3, 4, 5]);
        let dw = w.apply_derivation(&f, &act);
        assert_eq!(dw, w.scale(&f, f.from_int(3)));
        let w0 = WedgeVector::basis(6, &[0, 1, 2]);
        assert!(w0.apply_derivation(&f, &act).is_zero());
    }

    #[test]
    fn derivation_leibniz_off_diagonal() {
        let f = f5();
        // act sends y0 -> y4, everything else to 0
        let mut act = vec![vec![Fq::ZERO; 6]; 6];
        act[4][0] = Fq::ONE;
        let w = WedgeVector::basis(6, &[0, 1, 2]);
        let dw = w.apply_derivation(&f, &act);
        // y4 moves past y1, y2: two transpositions, sign +
        assert_eq!(dw, WedgeVector::basis(6, &[1, 2, 4]));
        // wedge with an existing label dies
        let w2 = WedgeVector::basis(6, &[0, 4]);
        assert!(w2.apply_derivation(&f, &act).is_zero());
    }
}

//! Square matrices of Laurent series. Inversion reports the precision it can
//! guarantee; elementary divisors come from a local Smith normal form with
//! valuation pivoting.

use super::field::{FieldCtx, Fq};
use super::series::{TruncatedSeries, ValuatedSeries};
use super::RingError;
use crate::grassmann::Coweight;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    pub d: usize,
    entries: Vec<ValuatedSeries>,
}

impl SeriesMatrix {
    pub fn zero(d: usize, known_below: i64) -> Self {
        SeriesMatrix {
            d,
            entries: vec![ValuatedSeries::zero(known_below); d * d],
        }
    }

    pub fn identity(d: usize, prec: usize) -> Self {
        let mut m = Self::zero(d, prec as i64);
        for i in 0..d {
            m.entries[i * d + i] = ValuatedSeries::from_const(Fq::ONE, prec);
        }
        m
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> ValuatedSeries) -> Self {
        let entries = (0..d * d).map(|k| f(k / d, k % d)).collect();
        SeriesMatrix { d, entries }
    }

    /// diag(u^{a_1}, ..., u^{a_d}).
    pub fn monomial_diag(exps: &[i64], prec: usize) -> Self {
        let d = exps.len();
        Self::from_fn(d, |i, j| {
            if i == j {
                ValuatedSeries::monomial(Fq::ONE, exps[i], prec)
            } else {
                ValuatedSeries::zero(exps[i] + prec as i64)
            }
        })
    }

    /// Constant matrix from field elements.
    pub fn from_consts(d: usize, vals: &[Fq], prec: usize) -> Self {
        assert_eq!(vals.len(), d * d);
        Self::from_fn(d, |i, j| {
            let c = vals[i * d + j];
            if c.is_zero() {
                ValuatedSeries::zero(prec as i64)
            } else {
                ValuatedSeries::from_const(c, prec)
            }
        })
    }

    pub fn at(&self, i: usize, j: usize) -> &ValuatedSeries {
        &self.entries[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ValuatedSeries) {
        self.entries[i * self.d + j] = v;
    }

    pub fn map(&self, mut f: impl FnMut(&ValuatedSeries) -> ValuatedSeries) -> Self {
        SeriesMatrix {
            d: self.d,
            entries: self.entries.iter().map(|e| f(e)).collect(),
        }
    }

    pub fn add(&self, other: &Self, f: &FieldCtx) -> Self {
        assert_eq!(self.d, other.d);
        SeriesMatrix {
            d: self.d,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b, f))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self, f: &FieldCtx) -> Self {
        assert_eq!(self.d, other.d);
        SeriesMatrix {
            d: self.d,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b, f))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self, f: &FieldCtx) -> Self {
        assert_eq!(self.d, other.d);
        let d = self.d;
        Self::from_fn(d, |i, j| {
            let mut acc = self.at(i, 0).mul(other.at(0, j), f);
            for k in 1..d {
                acc = acc.add(&self.at(i, k).mul(other.at(k, j), f), f);
            }
            acc
        })
    }

    pub fn scale(&self, s: &ValuatedSeries, f: &FieldCtx) -> Self {
        self.map(|e| e.mul(s, f))
    }

    /// Entrywise u d/du.
    pub fn euler_derive(&self, f: &FieldCtx) -> Self {
        self.map(|e| e.euler_derive(f))
    }

    /// Entrywise F-linear substitution u -> u^p.
    pub fn frobenius_substitute(&self, f: &FieldCtx, cap: usize) -> Self {
        self.map(|e| e.frobenius_substitute(f, cap))
    }

    pub fn det(&self, f: &FieldCtx) -> ValuatedSeries {
        match self.d {
            1 => self.at(0, 0).clone(),
            2 => {
                let a = self.at(0, 0).mul(self.at(1, 1), f);
                let b = self.at(0, 1).mul(self.at(1, 0), f);
                a.sub(&b, f)
            }
            3 => {
                let mut acc: Option<ValuatedSeries> = None;
                // permutation expansion; d = 3 keeps this exact and cheap
                const PERMS: [([usize; 3], bool); 6] = [
                    ([0, 1, 2], true),
                    ([1, 2, 0], true),
                    ([2, 0, 1], true),
                    ([0, 2, 1], false),
                    ([2, 1, 0], false),
                    ([1, 0, 2], false),
                ];
                for (perm, pos) in PERMS {
                    let mut t = self.at(0, perm[0]).mul(self.at(1, perm[1]), f);
                    t = t.mul(self.at(2, perm[2]), f);
                    if !pos {
                        t = t.neg(f);
                    }
                    acc = Some(match acc {
                        None => t,
                        Some(a) => a.add(&t, f),
                    });
                }
                acc.unwrap()
            }
            _ => {
                // expansion along the first row
                let mut acc: Option<ValuatedSeries> = None;
                for j in 0..self.d {
                    let mut t = self.minor(0, j).det(f).mul(self.at(0, j), f);
                    if j % 2 == 1 {
                        t = t.neg(f);
                    }
                    acc = Some(match acc {
                        None => t,
                        Some(a) => a.add(&t, f),
                    });
                }
                acc.unwrap()
            }
        }
    }

    fn minor(&self, row: usize, col: usize) -> SeriesMatrix {
        let d = self.d - 1;
        SeriesMatrix::from_fn(d, |i, j| {
            let si = if i < row { i } else { i + 1 };
            let sj = if j < col { j } else { j + 1 };
            self.at(si, sj).clone()
        })
    }

    /// Adjugate, so that adj(M) * M = det(M) * I. Used as an independent
    /// check against the Gaussian inverse.
    pub fn adjugate(&self, f: &FieldCtx) -> SeriesMatrix {
        SeriesMatrix::from_fn(self.d, |i, j| {
            let m = self.minor(j, i).det(f);
            if (i + j) % 2 == 1 {
                m.neg(f)
            } else {
                m
            }
        })
    }

    /// Gauss-Jordan over Laurent series with min-valuation pivoting.
    /// Returns the inverse together with the absolute precision below which
    /// M * M^{-1} - I was verified to vanish.
    pub fn inverse(&self, f: &FieldCtx) -> Result<(SeriesMatrix, i64), RingError> {
        let d = self.d;
        let mut a = self.clone();
        let mut inv = SeriesMatrix::identity(
            d,
            self.entries
                .iter()
                .map(|e| e.known_prec().max(1))
                .max()
                .unwrap_or(1)
                .max(1) as usize,
        );
        for col in 0..d {
            let pivot_row = (col..d)
                .filter(|&r| !a.at(r, col).is_zero())
                .min_by_key(|&r| a.at(r, col).valuation().unwrap());
            let Some(pr) = pivot_row else {
                // whole column vanishes at available precision
                let bound = (col..d).map(|r| a.at(r, col).known_prec()).min().unwrap();
                if bound > 0 {
                    return Err(RingError::SingularMatrix);
                }
                return Err(RingError::PrecisionExhausted(
                    "pivot column vanishes within known precision".into(),
                ));
            };
            if pr != col {
                for j in 0..d {
                    let t = a.at(pr, j).clone();
                    a.set(pr, j, a.at(col, j).clone());
                    a.set(col, j, t);
                    let t = inv.at(pr, j).clone();
                    inv.set(pr, j, inv.at(col, j).clone());
                    inv.set(col, j, t);
                }
            }
            let piv_inv = a.at(col, col).invert(f)?;
            for j in 0..d {
                a.set(col, j, a.at(col, j).mul(&piv_inv, f));
                inv.set(col, j, inv.at(col, j).mul(&piv_inv, f));
            }
            for r in 0..d {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let factor = a.at(r, col).clone();
                for j in 0..d {
                    let na = a.at(r, j).sub(&factor.mul(a.at(col, j), f), f);
                    a.set(r, j, na);
                    let ni = inv.at(r, j).sub(&factor.mul(inv.at(col, j), f), f);
                    inv.set(r, j, ni);
                }
            }
        }
        // verify and report guaranteed precision
        let prod = self.mul(&inv, f);
        let id_prec = prod.known_prec().max(1) as usize;
        let residual = prod.sub(&SeriesMatrix::identity(d, id_prec), f);
        let mut guaranteed = i64::MAX;
        for i in 0..d {
            for j in 0..d {
                let e = residual.at(i, j);
                let z = match e.valuation() {
                    None => e.known_prec(),
                    Some(v) => v, // nonzero residual: only good below its valuation
                };
                guaranteed = guaranteed.min(z);
            }
        }
        if guaranteed <= 0 {
            return Err(RingError::PrecisionExhausted(
                "inverse could not be verified to any positive precision".into(),
            ));
        }
        Ok((inv, guaranteed))
    }

    /// Exponents (a_1 >= ... >= a_d) of the elementary divisors u^{a_i},
    /// by local Smith normal form. Requires det nonzero at precision.
    pub fn elementary_divisors(&self, f: &FieldCtx) -> Result<Coweight, RingError> {
        let d = self.d;
        let mut a = self.clone();
        let mut divisors = Vec::with_capacity(d);
        for t in 0..d {
            loop {
                let mut best: Option<(usize, usize, i64)> = None;
                for i in t..d {
                    for j in t..d {
                        if let Some(v) = a.at(i, j).valuation() {
                            if best.map_or(true, |(_, _, bv)| v < bv) {
                                best = Some((i, j, v));
                            }
                        }
                    }
                }
                let Some((pi, pj, pv)) = best else {
                    let bound = (t..d)
                        .flat_map(|i| (t..d).map(move |j| (i, j)))
                        .map(|(i, j)| a.at(i, j).known_prec())
                        .min()
                        .unwrap_or(0);
                    return Err(RingError::PrecisionExhausted(format!(
                        "block zero below u^{bound}, singular at working precision"
                    )));
                };
                // move pivot to (t, t)
                if pi != t {
                    for j in 0..d {
                        let tmp = a.at(pi, j).clone();
                        a.set(pi, j, a.at(t, j).clone());
                        a.set(t, j, tmp);
                    }
                }
                if pj != t {
                    for i in 0..d {
                        let tmp = a.at(i, pj).clone();
                        a.set(i, pj, a.at(i, t).clone());
                        a.set(i, t, tmp);
                    }
                }
                let piv = a.at(t, t).clone();
                let piv_inv = piv.invert(f)?;
                // clear column and row; quotients are exact because the pivot
                // has minimal valuation
                for i in t + 1..d {
                    if a.at(i, t).is_zero() {
                        continue;
                    }
                    let q = a.at(i, t).mul(&piv_inv, f);
                    for j in t..d {
                        let ne = a.at(i, j).sub(&q.mul(a.at(t, j), f), f);
                        a.set(i, j, ne);
                    }
                }
                for j in t + 1..d {
                    if a.at(t, j).is_zero() {
                        continue;
                    }
                    let q = a.at(t, j).mul(&piv_inv, f);
                    for i in t..d {
                        let ne = a.at(i, j).sub(&q.mul(a.at(i, t), f), f);
                        a.set(i, j, ne);
                    }
                }
                let row_clear = (t + 1..d).all(|j| a.at(t, j).is_zero());
                let col_clear = (t + 1..d).all(|i| a.at(i, t).is_zero());
                if row_clear && col_clear {
                    divisors.push(pv);
                    break;
                }
            }
        }
        divisors.sort_unstable_by(|x, y| y.cmp(x));
        Ok(Coweight::new(divisors))
    }

    /// Truncate every entry to the window [0, m), as polynomial coefficients.
    pub fn window(&self, m: i64) -> Result<Vec<Vec<TruncatedSeries>>, RingError> {
        let mut rows = Vec::with_capacity(self.d);
        for i in 0..self.d {
            let mut row = Vec::with_capacity(self.d);
            for j in 0..self.d {
                row.push(self.at(i, j).window(0, m)?);
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Minimum over entries of the known absolute precision.
    pub fn known_prec(&self) -> i64 {
        self.entries.iter().map(|e| e.known_prec()).min().unwrap()
    }

    pub fn min_valuation(&self) -> Option<i64> {
        self.entries.iter().filter_map(|e| e.valuation()).min()
    }

    /// All entries vanish modulo u^m (errors if precision cannot tell).
    pub fn is_zero_mod(&self, m: i64) -> Result<bool, RingError> {
        let mut all = true;
        for e in &self.entries {
            all &= e.is_zero_mod(m)?;
        }
        Ok(all)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.valuation().map_or(true, |v| v >= 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldCtx {
        FieldCtx::new(5, 1).unwrap()
    }

    const P: usize = 16;

    fn umat(f: &FieldCtx, exps: [i64; 3]) -> SeriesMatrix {
        let _ = f;
        SeriesMatrix::monomial_diag(&exps, P)
    }

    #[test]
    fn inverse_of_monomial_diag() {
        let f = f5();
        let m = umat(&f, [2, 1, 0]);
        let (inv, prec) = m.inverse(&f).unwrap();
        assert!(prec >= P as i64 - 3);
        assert_eq!(inv.at(0, 0).valuation(), Some(-2));
        assert_eq!(inv.at(1, 1).valuation(), Some(-1));
        assert_eq!(inv.at(2, 2).valuation(), Some(0));
    }

    #[test]
    fn inverse_of_unipotent() {
        let f = f5();
        // (I + u E_12)^{-1} = I - u E_12
        let mut m = SeriesMatrix::identity(3, P);
        m.set(0, 1, ValuatedSeries::monomial(Fq::ONE, 1, P));
        let (inv, _) = m.inverse(&f).unwrap();
        assert_eq!(inv.at(0, 1).valuation(), Some(1));
        assert_eq!(inv.at(0, 1).coeff(1), Some(f.neg(Fq::ONE)));
        assert!(m.mul(&inv, &f).sub(&SeriesMatrix::identity(3, P), &f).is_zero_mod(10).unwrap());
    }

    #[test]
    fn singular_matrix_detected() {
        let f = f5();
        let m = SeriesMatrix::zero(2, P as i64);
        assert!(matches!(m.inverse(&f), Err(RingError::SingularMatrix)));
    }

    #[test]
    fn adjugate_identity_check() {
        let f = f5();
        let mut rng = crate::util::Rng::new(3);
        for _ in 0..20 {
            let m = SeriesMatrix::from_fn(3, |_, _| {
                let mut ts = TruncatedSeries::zero(P);
                for c in ts.coeffs.iter_mut() {
                    *c = f.from_int(rng.below(5) as i64);
                }
                ValuatedSeries::from_truncated(ts, 0)
            });
            let det = m.det(&f);
            if det.is_zero() {
                continue;
            }
            let lhs = m.adjugate(&f).mul(&m, &f);
            let rhs = SeriesMatrix::identity(3, P).scale(&det, &f);
            let diff = lhs.sub(&rhs, &f);
            let bound = diff.known_prec().min(P as i64 - 4);
            assert!(diff.is_zero_mod(bound).unwrap());
        }
    }

    #[test]
    fn divisors_of_examples() {
        let f = f5();
        assert_eq!(
            umat(&f, [2, 1, 0]).elementary_divisors(&f).unwrap().entries(),
            &[2, 1, 0]
        );
        // [[u,1],[0,u]] has divisors (2,0): entry gcd is a unit, det is u^2
        let mut m = SeriesMatrix::zero(2, P as i64);
        m.set(0, 0, ValuatedSeries::monomial(Fq::ONE, 1, P));
        m.set(0, 1, ValuatedSeries::from_const(Fq::ONE, P));
        m.set(1, 1, ValuatedSeries::monomial(Fq::ONE, 1, P));
        assert_eq!(m.elementary_divisors(&f).unwrap().entries(), &[2, 0]);
    }

    #[test]
    fn divisors_detect_xz_pattern() {
        let f = f5();
        // uM with superdiagonal (1, 0): divisors (2,1,0); with (1,1): (3,0,0)
        let mut m = umat(&f, [1, 1, 1]);
        m.set(0, 1, ValuatedSeries::from_const(Fq::ONE, P));
        assert_eq!(m.elementary_divisors(&f).unwrap().entries(), &[2, 1, 0]);
        m.set(1, 2, ValuatedSeries::from_const(Fq::ONE, P));
        assert_eq!(m.elementary_divisors(&f).unwrap().entries(), &[3, 0, 0]);
    }

    #[test]
    fn divisor_sum_is_det_valuation() {
        let f = f5();
        let mut rng = crate::util::Rng::new(9);
        for _ in 0..30 {
            let m = SeriesMatrix::from_fn(3, |_, _| {
                let mut ts = TruncatedSeries::zero(P);
                for c in ts.coeffs.iter_mut() {
                    *c = f.from_int(rng.below(5) as i64);
                }
                ValuatedSeries::from_truncated(ts, rng.below(3) as i64)
            });
            let det = m.det(&f);
            let Some(dv) = det.valuation() else { continue };
            if dv + 4 > m.known_prec() {
                continue;
            }
            let div = m.elementary_divisors(&f).unwrap();
            assert_eq!(div.entries().iter().sum::<i64>(), dv);
        }
    }

    #[test]
    fn multiplication_associative_sampled() {
        let f = f5();
        let mut rng = crate::util::Rng::new(5);
        for _ in 0..10 {
            let rand_mat = |rng: &mut crate::util::Rng| {
                SeriesMatrix::from_fn(3, |_, _| {
                    let mut ts = TruncatedSeries::zero(P);
                    for c in ts.coeffs.iter_mut() {
                        *c = f.from_int(rng.below(5) as i64);
                    }
                    ValuatedSeries::from_truncated(ts, 0)
                })
            };
            let (a, b, c) = (rand_mat(&mut rng), rand_mat(&mut rng), rand_mat(&mut rng));
            let l = a.mul(&b, &f).mul(&c, &f);
            let r = a.mul(&b.mul(&c, &f), &f);
            let diff = l.sub(&r, &f);
            let bound = diff.known_prec();
            assert!(diff.is_zero_mod(bound).unwrap());
        }
    }
}

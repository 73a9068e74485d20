//! Truncated power series over F_q and Laurent series via explicit valuation.
//!
//! Precision discipline: a [`TruncatedSeries`] stores exactly the known
//! coefficients c_0..c_{P-1}; every binary operation outputs the minimum of
//! the operand precisions. A congruence "f == 0 mod u^m" is only answered
//! when at least m coefficients are known; otherwise the caller gets
//! `PrecisionExhausted` instead of a silent pass.

use super::field::{FieldCtx, Fq};
use super::RingError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    /// Known coefficients; `coeffs.len()` is the precision.
    pub coeffs: Vec<Fq>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeriveMode {
    /// d/du, dropping one coefficient of precision.
    Plain,
    /// u d/du, keeping precision.
    Euler,
}

impl TruncatedSeries {
    pub fn zero(prec: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Fq::ZERO; prec],
        }
    }

    pub fn one(prec: usize) -> Self {
        let mut s = Self::zero(prec);
        if prec > 0 {
            s.coeffs[0] = Fq::ONE;
        }
        s
    }

    pub fn monomial(c: Fq, deg: usize, prec: usize) -> Self {
        let mut s = Self::zero(prec);
        if deg < prec {
            s.coeffs[deg] = c;
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<Fq>) -> Self {
        TruncatedSeries { coeffs }
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> Option<Fq> {
        self.coeffs.get(i).copied()
    }

    /// Index of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero_known(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs.first().is_some_and(|c| !c.is_zero())
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.truncate(prec);
        TruncatedSeries { coeffs: c }
    }

    pub fn add(&self, other: &Self, f: &FieldCtx) -> Self {
        let prec = self.prec().min(other.prec());
        let coeffs = (0..prec)
            .map(|i| f.add(self.coeffs[i], other.coeffs[i]))
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn sub(&self, other: &Self, f: &FieldCtx) -> Self {
        let prec = self.prec().min(other.prec());
        let coeffs = (0..prec)
            .map(|i| f.sub(self.coeffs[i], other.coeffs[i]))
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn neg(&self, f: &FieldCtx) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: Fq, f: &FieldCtx) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self, f: &FieldCtx) -> Self {
        let prec = self.prec().min(other.prec());
        let mut coeffs = vec![Fq::ZERO; prec];
        for (i, &a) in self.coeffs.iter().enumerate().take(prec) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(prec - i) {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        TruncatedSeries { coeffs }
    }

    /// Multiplication by the exact monomial u^k gains k known coefficients.
    pub fn mul_monomial(&self, k: usize) -> Self {
        let mut coeffs = vec![Fq::ZERO; self.prec() + k];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i + k] = c;
        }
        TruncatedSeries { coeffs }
    }

    /// Inverse of a unit at the same precision.
    pub fn invert(&self, f: &FieldCtx) -> Result<Self, RingError> {
        let c0 = self.coeffs.first().copied().unwrap_or(Fq::ZERO);
        if c0.is_zero() {
            return Err(RingError::NonUnit);
        }
        let c0i = f.inv(c0)?;
        let prec = self.prec();
        let mut inv = vec![Fq::ZERO; prec];
        inv[0] = c0i;
        for n in 1..prec {
            let mut s = Fq::ZERO;
            for j in 0..n {
                s = f.add(s, f.mul(self.coeffs[n - j], inv[j]));
            }
            inv[n] = f.neg(f.mul(c0i, s));
        }
        Ok(TruncatedSeries { coeffs: inv })
    }

    /// F-linear Frobenius substitution u -> u^p; coefficients are not moved
    /// through the field Frobenius. Output precision equals input precision.
    pub fn frobenius_substitute(&self, f: &FieldCtx) -> Self {
        let prec = self.prec();
        let mut coeffs = vec![Fq::ZERO; prec];
        for (j, &c) in self.coeffs.iter().enumerate() {
            let d = j * f.p as usize;
            if d < prec {
                coeffs[d] = c;
            }
        }
        TruncatedSeries { coeffs }
    }

    /// Partial inverse of `frobenius_substitute`: defined when every known
    /// coefficient away from p-multiples vanishes.
    pub fn frobenius_unsubstitute(&self, f: &FieldCtx) -> Result<Self, RingError> {
        let p = f.p as usize;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if j % p != 0 && !c.is_zero() {
                return Err(RingError::BadContext(format!(
                    "coefficient at u^{j} obstructs a Frobenius preimage"
                )));
            }
        }
        let prec = self.prec().div_ceil(p);
        let coeffs = (0..prec)
            .map(|i| self.coeffs.get(i * p).copied().unwrap_or(Fq::ZERO))
            .collect();
        Ok(TruncatedSeries { coeffs })
    }

    pub fn derive(&self, mode: DeriveMode, f: &FieldCtx) -> Self {
        match mode {
            DeriveMode::Plain => {
                let prec = self.prec().saturating_sub(1);
                let coeffs = (0..prec)
                    .map(|i| f.mul(self.coeffs[i + 1], f.from_int((i + 1) as i64)))
                    .collect();
                TruncatedSeries { coeffs }
            }
            DeriveMode::Euler => {
                let coeffs = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
                    .collect();
                TruncatedSeries { coeffs }
            }
        }
    }

    /// Whether f == 0 mod u^m, erroring when fewer than m coefficients are known.
    pub fn is_zero_mod(&self, m: usize) -> Result<bool, RingError> {
        if self.prec() < m {
            return Err(RingError::PrecisionExhausted(format!(
                "need {m} coefficients, have {}",
                self.prec()
            )));
        }
        Ok(self.coeffs[..m].iter().all(|c| c.is_zero()))
    }
}

/// A Laurent series u^v * (unit or zero). The zero series records how far it
/// is known to vanish: `val` is then an exclusive known-zero bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuatedSeries {
    val: i64,
    body: TruncatedSeries, // empty coeffs <=> zero
}

impl ValuatedSeries {
    pub fn zero(known_below: i64) -> Self {
        ValuatedSeries {
            val: known_below,
            body: TruncatedSeries { coeffs: vec![] },
        }
    }

    /// Normalize a truncated series sitting at u^shift.
    pub fn from_truncated(ts: TruncatedSeries, shift: i64) -> Self {
        match ts.valuation() {
            None => ValuatedSeries::zero(shift + ts.prec() as i64),
            Some(v) => ValuatedSeries {
                val: shift + v as i64,
                body: TruncatedSeries {
                    coeffs: ts.coeffs[v..].to_vec(),
                },
            },
        }
    }

    pub fn from_const(c: Fq, prec: usize) -> Self {
        Self::from_truncated(TruncatedSeries::monomial(c, 0, prec), 0)
    }

    pub fn monomial(c: Fq, deg: i64, prec: usize) -> Self {
        if c.is_zero() {
            ValuatedSeries::zero(deg + prec as i64)
        } else {
            ValuatedSeries {
                val: deg,
                body: TruncatedSeries {
                    coeffs: {
                        let mut v = vec![Fq::ZERO; prec.max(1)];
                        v[0] = c;
                        v
                    },
                },
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.body.coeffs.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Absolute index below which all coefficients are known.
    pub fn known_prec(&self) -> i64 {
        if self.is_zero() {
            self.val
        } else {
            self.val + self.body.prec() as i64
        }
    }

    pub fn coeff(&self, i: i64) -> Option<Fq> {
        if i >= self.known_prec() {
            return None;
        }
        if self.is_zero() || i < self.val {
            return Some(Fq::ZERO);
        }
        Some(self.body.coeffs[(i - self.val) as usize])
    }

    /// The underlying unit part (valuation stripped). Panics on zero.
    pub fn unit_part(&self) -> &TruncatedSeries {
        assert!(!self.is_zero());
        &self.body
    }

    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.val += k;
        s
    }

    pub fn mul(&self, other: &Self, f: &FieldCtx) -> Self {
        if self.is_zero() || other.is_zero() {
            // zero known below b times valuation >= v is zero known below b+v
            let bound = if self.is_zero() && other.is_zero() {
                self.val + other.val
            } else if self.is_zero() {
                self.val + other.valuation().unwrap()
            } else {
                other.val + self.valuation().unwrap()
            };
            return ValuatedSeries::zero(bound);
        }
        ValuatedSeries::from_truncated(self.body.mul(&other.body, f), self.val + other.val)
    }

    pub fn add(&self, other: &Self, f: &FieldCtx) -> Self {
        if self.is_zero() && other.is_zero() {
            return ValuatedSeries::zero(self.val.min(other.val));
        }
        if self.is_zero() {
            return other.restrict(self.val);
        }
        if other.is_zero() {
            return self.restrict(other.val);
        }
        let v = self.val.min(other.val);
        let bound = self.known_prec().min(other.known_prec());
        let prec = (bound - v).max(0) as usize;
        let mut coeffs = vec![Fq::ZERO; prec];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let idx = v + i as i64;
            let a = self.coeff(idx).unwrap_or(Fq::ZERO);
            let b = other.coeff(idx).unwrap_or(Fq::ZERO);
            *c = f.add(a, b);
        }
        ValuatedSeries::from_truncated(TruncatedSeries { coeffs }, v)
    }

    pub fn sub(&self, other: &Self, f: &FieldCtx) -> Self {
        self.add(&other.neg(f), f)
    }

    pub fn neg(&self, f: &FieldCtx) -> Self {
        ValuatedSeries {
            val: self.val,
            body: self.body.neg(f),
        }
    }

    pub fn scale(&self, c: Fq, f: &FieldCtx) -> Self {
        if c.is_zero() {
            return ValuatedSeries::zero(self.known_prec());
        }
        ValuatedSeries {
            val: self.val,
            body: self.body.scale(c, f),
        }
    }

    /// Clamp known precision down to `bound` (used when mixing with data
    /// only known below `bound`).
    fn restrict(&self, bound: i64) -> Self {
        if self.known_prec() <= bound {
            return self.clone();
        }
        if self.is_zero() {
            return ValuatedSeries::zero(bound);
        }
        let keep = (bound - self.val).max(0) as usize;
        ValuatedSeries::from_truncated(self.body.truncate(keep), self.val)
    }

    pub fn invert(&self, f: &FieldCtx) -> Result<Self, RingError> {
        if self.is_zero() {
            return Err(RingError::NonUnit);
        }
        Ok(ValuatedSeries {
            val: -self.val,
            body: self.body.invert(f)?,
        })
    }

    pub fn frobenius_substitute(&self, f: &FieldCtx, cap: usize) -> Self {
        if self.is_zero() {
            return ValuatedSeries::zero(self.val * f.p as i64);
        }
        let p = f.p as usize;
        let prec = ((self.body.prec() - 1) * p + 1).min(cap.max(1));
        let mut coeffs = vec![Fq::ZERO; prec];
        for (j, &c) in self.body.coeffs.iter().enumerate() {
            if j * p < prec {
                coeffs[j * p] = c;
            }
        }
        ValuatedSeries::from_truncated(TruncatedSeries { coeffs }, self.val * f.p as i64)
    }

    /// u d/du. Valuations are exact so this is exact on the known window.
    pub fn euler_derive(&self, f: &FieldCtx) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let coeffs = self
            .body
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f.mul(c, f.from_int(self.val + i as i64)))
            .collect();
        ValuatedSeries::from_truncated(TruncatedSeries { coeffs }, self.val)
    }

    pub fn is_zero_mod(&self, m: i64) -> Result<bool, RingError> {
        if self.known_prec() < m {
            return Err(RingError::PrecisionExhausted(format!(
                "need coefficients below u^{m}, known below u^{}",
                self.known_prec()
            )));
        }
        if self.is_zero() {
            return Ok(true);
        }
        Ok(self.val >= m)
    }

    /// Extract coefficients c_a..c_{b-1} as a truncated series (c_a first).
    pub fn window(&self, a: i64, b: i64) -> Result<TruncatedSeries, RingError> {
        if self.known_prec() < b {
            return Err(RingError::PrecisionExhausted(format!(
                "window up to u^{b} exceeds known precision u^{}",
                self.known_prec()
            )));
        }
        let coeffs = (a..b)
            .map(|i| self.coeff(i).unwrap_or(Fq::ZERO))
            .collect();
        Ok(TruncatedSeries { coeffs })
    }
}

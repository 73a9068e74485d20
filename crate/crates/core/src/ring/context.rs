//! Shared numeric context: field, ramification and truncation parameters,
//! and the unit series c(u) with its Frobenius companion d(u).

use super::field::{FieldCtx, Fq};
use super::series::TruncatedSeries;
use super::RingError;

/// All parameters the congruence checks need, validated once. The embedding
/// index follows tau . phi = tau + 1 mod f throughout.
pub struct ArithContext {
    pub field: FieldCtx,
    pub p: u32,
    pub k: u32,
    /// Ramification degree.
    pub e: usize,
    /// Number of embeddings.
    pub f: usize,
    /// Height bound.
    pub h: usize,
    /// Rank.
    pub d: usize,
    /// Working precision for every series built from this context.
    pub prec: usize,
    /// Unit series c_tau(u), one per embedding.
    pub c: Vec<TruncatedSeries>,
    /// d_tau(u), the inverse of the Frobenius preimage of c, indexed so that
    /// phi(d_{tau+1}) * c_tau = 1.
    pub d_series: Vec<TruncatedSeries>,
}

impl std::fmt::Debug for ArithContext {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            fm,
            "ArithContext(p={}, k={}, e={}, f={}, h={}, d={}, prec={})",
            self.p, self.k, self.e, self.f, self.h, self.d, self.prec
        )
    }
}

impl ArithContext {
    /// Minimal precision sufficient for every congruence the other modules
    /// check: e*p + h*e*d + e + 2.
    pub fn required_prec(p: u32, e: usize, h: usize, d: usize) -> usize {
        e * p as usize + h * e * d + e + 2
    }

    /// Context with c_tau(u) given by integer coefficient lists (low to high).
    pub fn new(
        p: u32,
        k: u32,
        e: usize,
        f: usize,
        h: usize,
        d: usize,
        c_coeffs: &[Vec<i64>],
    ) -> Result<ArithContext, RingError> {
        let prec = Self::required_prec(p, e, h, d) + 4;
        Self::with_prec(p, k, e, f, h, d, c_coeffs, prec)
    }

    pub fn with_prec(
        p: u32,
        k: u32,
        e: usize,
        f: usize,
        h: usize,
        d: usize,
        c_coeffs: &[Vec<i64>],
        prec: usize,
    ) -> Result<ArithContext, RingError> {
        if e == 0 || f == 0 || h == 0 || d == 0 {
            return Err(RingError::BadContext("e, f, h, d must be positive".into()));
        }
        if prec < Self::required_prec(p, e, h, d) {
            return Err(RingError::BadContext(format!(
                "precision {prec} below the required {}",
                Self::required_prec(p, e, h, d)
            )));
        }
        let field = FieldCtx::new(p, k)?;
        let mut c = Vec::with_capacity(f);
        if c_coeffs.len() != f && c_coeffs.len() != 1 {
            return Err(RingError::BadContext(
                "need one c(u) per embedding, or a single one for all".into(),
            ));
        }
        for tau in 0..f {
            let coeffs = &c_coeffs[tau % c_coeffs.len()];
            let mut s = TruncatedSeries::zero(prec);
            for (i, &v) in coeffs.iter().enumerate() {
                if i < prec {
                    s.coeffs[i] = field.from_int(v);
                }
            }
            if !s.is_unit() {
                return Err(RingError::BadContext(format!("c_{tau}(0) = 0")));
            }
            c.push(s);
        }
        // d_{tau+1} = (phi^{-1}(c_tau))^{-1}
        let mut d_series = vec![TruncatedSeries::zero(0); f];
        for tau in 0..f {
            let pre = c[tau].frobenius_unsubstitute(&field)?;
            let inv = pre.invert(&field)?;
            if !inv.is_unit() {
                return Err(RingError::BadContext(format!("d_{}(0) = 0", (tau + 1) % f)));
            }
            d_series[(tau + 1) % f] = inv;
        }
        Ok(ArithContext {
            field,
            p,
            k,
            e,
            f,
            h,
            d,
            prec,
            c,
            d_series,
        })
    }

    /// The standard context used by most experiments: c(u) identically a
    /// nonzero constant.
    pub fn standard(p: u32, e: usize, f: usize, c0: i64) -> Result<ArithContext, RingError> {
        Self::new(p, 1, e, f, 2, 3, &[vec![c0]])
    }

    pub fn q(&self) -> u32 {
        self.field.q
    }

    pub fn fq(&self, n: i64) -> Fq {
        self.field.from_int(n)
    }

    pub fn tau_next(&self, tau: usize) -> usize {
        (tau + 1) % self.f
    }
}

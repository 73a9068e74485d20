//! The pair (X, N): an invertible Frobenius matrix per embedding together
//! with a truncated monodromy matrix, the congruence they must satisfy, and
//! the stratification by the relative position of X.

use super::BkError;
use crate::grassmann::Coweight;
use crate::ring::{ArithContext, SeriesMatrix};

/// One Frobenius matrix X_tau and one monodromy matrix N_tau per embedding.
/// N_tau must vanish at u = 0 and is only meaningful modulo u^{e+1}.
#[derive(Clone, Debug)]
pub struct BkPair {
    pub x: Vec<SeriesMatrix>,
    pub n: Vec<SeriesMatrix>,
}

impl BkPair {
    pub fn new(ctx: &ArithContext, x: Vec<SeriesMatrix>, n: Vec<SeriesMatrix>) -> Result<Self, BkError> {
        if x.len() != ctx.f || n.len() != ctx.f {
            return Err(BkError::NotInCone(format!(
                "expected {} embeddings, got ({}, {})",
                ctx.f,
                x.len(),
                n.len()
            )));
        }
        for (tau, m) in n.iter().enumerate() {
            if let Some(v) = m.min_valuation() {
                if v < 1 {
                    return Err(BkError::NotInCone(format!(
                        "N_{tau} does not vanish at u = 0"
                    )));
                }
            }
        }
        for (tau, m) in x.iter().enumerate() {
            let f = &ctx.field;
            let det = m.det(f);
            let Some(v) = det.valuation() else {
                return Err(BkError::NotInCone(format!("det X_{tau} = 0 at precision")));
            };
            let bound = (ctx.h * ctx.e * ctx.d) as i64;
            if v < 0 || v > bound {
                return Err(BkError::NotInCone(format!(
                    "v(det X_{tau}) = {v} outside [0, {bound}]"
                )));
            }
        }
        Ok(BkPair { x, n })
    }

    /// Truncate the monodromy matrices to the window where they are defined.
    pub fn normalized_n(&self, ctx: &ArithContext) -> Vec<SeriesMatrix> {
        self.n
            .iter()
            .map(|m| {
                m.map(|e| {
                    let bound = (ctx.e + 1) as i64;
                    match e.window(0, bound.min(e.known_prec())) {
                        Ok(ts) => crate::ring::ValuatedSeries::from_truncated(ts, 0),
                        Err(_) => e.clone(),
                    }
                })
            })
            .collect()
    }
}

/// Left side minus right side of the defining congruence, per embedding:
/// u^e [X_tau phi(N_{tau+1}) X_tau^{-1} - c_tau dlog-term] - c_tau N_tau.
/// The pair is a point of the moduli locus iff every entry vanishes
/// modulo u^{e+1}.
pub fn monodromy_residual(pair: &BkPair, ctx: &ArithContext) -> Result<Vec<SeriesMatrix>, BkError> {
    let f = &ctx.field;
    let e = ctx.e;
    let mut out = Vec::with_capacity(ctx.f);
    for tau in 0..ctx.f {
        let x = &pair.x[tau];
        let (x_inv, _) = x.inverse(f)?;
        let n_next = pair.n[ctx.tau_next(tau)].frobenius_substitute(f, ctx.prec);
        let c = crate::ring::ValuatedSeries::from_truncated(ctx.c[tau].clone(), 0);
        let term1 = x.mul(&n_next, f).mul(&x_inv, f);
        let term2 = x.euler_derive(f).mul(&x_inv, f).scale(&c, f);
        let lhs = term1.sub(&term2, f).map(|v| v.shift(e as i64));
        let rhs = pair.n[tau].scale(&c, f);
        out.push(lhs.sub(&rhs, f));
    }
    Ok(out)
}

/// All residuals vanish modulo u^{e+1}.
pub fn is_bk_point(pair: &BkPair, ctx: &ArithContext) -> Result<bool, BkError> {
    let res = monodromy_residual(pair, ctx)?;
    let mut ok = true;
    for r in res {
        ok &= r.is_zero_mod((ctx.e + 1) as i64).map_err(BkError::Ring)?;
    }
    Ok(ok)
}

/// Condition (C) via the two explicit matrices in the distinguished basis of
/// the top step: with X_e = X u^{-eh},
///   u^e [X_e phi(N') X_e^{-1} - c dlog(X_e)-term]  vs  c (N + e h u^e).
/// The e*h-term cancellation against the plain congruence is a tested
/// identity, not an assumption.
pub fn check_c(pair: &BkPair, ctx: &ArithContext) -> Result<bool, BkError> {
    let f = &ctx.field;
    let e = ctx.e as i64;
    let eh = (ctx.e * ctx.h) as i64;
    let mut ok = true;
    for tau in 0..ctx.f {
        let x_e = pair.x[tau].map(|v| v.shift(-eh));
        let (xe_inv, _) = x_e.inverse(f)?;
        let n_next = pair.n[ctx.tau_next(tau)].frobenius_substitute(f, ctx.prec);
        let c = crate::ring::ValuatedSeries::from_truncated(ctx.c[tau].clone(), 0);
        let lhs = x_e
            .mul(&n_next, f)
            .mul(&xe_inv, f)
            .sub(&x_e.euler_derive(f).mul(&xe_inv, f).scale(&c, f), f)
            .map(|v| v.shift(e));
        let shift_term = SeriesMatrix::identity(ctx.d, ctx.prec)
            .map(|v| v.shift(e))
            .scale(&crate::ring::ValuatedSeries::from_const(f.from_int(eh), ctx.prec), f);
        let rhs = pair.n[tau].add(&shift_term, f).scale(&c, f);
        ok &= lhs.sub(&rhs, f).is_zero_mod(e + 1).map_err(BkError::Ring)?;
    }
    Ok(ok)
}

/// The relative position of one X_tau, decomposed against the top stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumDescriptor {
    pub mu: Coweight,
    pub n: i64,
    pub m: i64,
    pub balanced: bool,
}

impl StratumDescriptor {
    /// mu = e(2,1,0) + n(-1,1,0) + m(0,-1,1) with n, m >= 0.
    pub fn from_mu(mu: Coweight, e: usize) -> Result<Self, BkError> {
        if mu.len() != 3 {
            return Err(BkError::NotInCone("stratification needs d = 3".into()));
        }
        let e = e as i64;
        if mu.sum() != 3 * e || !mu.is_dominant() {
            return Err(BkError::NotInCone(format!(
                "{:?} is not a dominant coweight of total 3e",
                mu.entries()
            )));
        }
        let n = 2 * e - mu.entries()[0];
        let m = mu.entries()[2];
        if n < 0 || m < 0 {
            return Err(BkError::NotInCone(format!(
                "{:?} not below (2e, e, 0)",
                mu.entries()
            )));
        }
        debug_assert_eq!(mu.entries()[1], e + n - m);
        let balanced = mu.alpha() <= e && mu.beta() <= e && mu.gamma() >= e;
        Ok(StratumDescriptor { mu, n, m, balanced })
    }
}

/// Solve the congruence for N given X, by fixed-point iteration on
///   c N = u^e [X phi(N') X^{-1} - c dlog-term]  (mod u^{e+1}).
/// The Frobenius feedback sits at valuation >= p, so a few rounds settle it
/// whenever it settles at all; the result is verified before returning.
pub fn solve_monodromy(x: Vec<SeriesMatrix>, ctx: &ArithContext) -> Result<BkPair, BkError> {
    let f = &ctx.field;
    let e = ctx.e;
    let bound = (e + 1) as i64;
    let mut n: Vec<SeriesMatrix> = vec![SeriesMatrix::zero(ctx.d, ctx.prec as i64); ctx.f];
    let x_inv: Vec<SeriesMatrix> = x
        .iter()
        .map(|m| m.inverse(f).map(|(inv, _)| inv))
        .collect::<Result<_, _>>()?;
    let c_inv: Vec<_> = ctx
        .c
        .iter()
        .map(|c| {
            c.invert(f)
                .map(|i| crate::ring::ValuatedSeries::from_truncated(i, 0))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for _round in 0..4 {
        let mut next = Vec::with_capacity(ctx.f);
        for tau in 0..ctx.f {
            let n_next = n[ctx.tau_next(tau)].frobenius_substitute(f, ctx.prec);
            let lhs = x[tau]
                .mul(&n_next, f)
                .mul(&x_inv[tau], f)
                .scale(&c_inv[tau], f)
                .sub(&x[tau].euler_derive(f).mul(&x_inv[tau], f), f)
                .map(|v| v.shift(e as i64));
            // truncate to the monodromy window
            let trunc = lhs.map(|v| {
                let w = v
                    .window(0, bound.min(v.known_prec()))
                    .unwrap_or_else(|_| crate::ring::TruncatedSeries::zero(0));
                crate::ring::ValuatedSeries::from_truncated(w, 0)
            });
            next.push(trunc);
        }
        n = next;
    }
    let pair = BkPair::new(ctx, x, n)?;
    if !is_bk_point(&pair, ctx)? {
        return Err(BkError::NotInCone(
            "monodromy iteration did not converge to a solution".into(),
        ));
    }
    Ok(pair)
}

/// Stratum descriptors of a pair, one per embedding.
pub fn stratum(pair: &BkPair, ctx: &ArithContext) -> Result<Vec<StratumDescriptor>, BkError> {
    let f = &ctx.field;
    pair.x
        .iter()
        .map(|x| {
            let mu = x.elementary_divisors(f)?;
            StratumDescriptor::from_mu(mu, ctx.e)
        })
        .collect()
}

//! The coordinate chart on a stratum: lower-unipotent B with degree bounds
//! read off the root pairings of mu, a strictly-lower Y with entries in
//! u*F[u]_{<e}, an invertible h, and a constant framing g. The chart carries
//! its own closed condition; the dictionary to the pair congruence is
//! implemented verbatim and compared, not assumed.

use super::pair::BkPair;
use super::BkError;
use crate::grassmann::Coweight;
use crate::ring::{ArithContext, Fq, SeriesMatrix, ValuatedSeries};

#[derive(Clone, Debug)]
pub struct ChartPoint {
    pub h: Vec<SeriesMatrix>,
    pub b: Vec<SeriesMatrix>,
    pub y: Vec<SeriesMatrix>,
    pub g: Vec<SeriesMatrix>,
}

impl ChartPoint {
    /// Degree bounds: the three B-entries are polynomials of degree below the
    /// alpha, beta, gamma pairings of mu; Y-entries lie in u F[u] of degree
    /// at most e.
    pub fn validate(&self, mu: &[Coweight], ctx: &ArithContext) -> Result<(), BkError> {
        for tau in 0..ctx.f {
            let m = &mu[tau];
            let bounds = [(1usize, 0usize, m.alpha()), (2, 1, m.beta()), (2, 0, m.gamma())];
            for (r, c, bound) in bounds {
                let entry = self.b[tau].at(r, c);
                if let Some(v) = entry.valuation() {
                    let deg_ok = (v..entry.known_prec())
                        .all(|i| i < bound || entry.coeff(i).unwrap_or(Fq::ZERO).is_zero());
                    if !deg_ok {
                        return Err(BkError::NotInCone(format!(
                            "B_{tau} entry ({r},{c}) exceeds degree bound {bound}"
                        )));
                    }
                }
            }
            for r in 0..3 {
                for c in 0..3 {
                    let entry = self.y[tau].at(r, c);
                    if r <= c {
                        if !entry.is_zero() {
                            return Err(BkError::NotInCone(format!(
                                "Y_{tau} is not strictly lower triangular"
                            )));
                        }
                        continue;
                    }
                    if let Some(v) = entry.valuation() {
                        if v < 1 {
                            return Err(BkError::NotInCone(format!(
                                "Y_{tau} entry ({r},{c}) has nonzero constant term"
                            )));
                        }
                        let deg_ok = (v..entry.known_prec()).all(|i| {
                            i <= ctx.e as i64 || entry.coeff(i).unwrap_or(Fq::ZERO).is_zero()
                        });
                        if !deg_ok {
                            return Err(BkError::NotInCone(format!(
                                "Y_{tau} entry ({r},{c}) exceeds degree {}",
                                ctx.e
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The chart's closed condition, as a residual matrix per embedding:
/// Ad(u^mu) u^e [dB B^{-1} + B phi(h^{-1} d(u) Y h)_{tau+1} B^{-1}] - Y_tau,
/// meaningful modulo u^{e+1}.
pub fn chart_residual(
    cp: &ChartPoint,
    mu: &[Coweight],
    ctx: &ArithContext,
) -> Result<Vec<SeriesMatrix>, BkError> {
    let f = &ctx.field;
    let e = ctx.e as i64;
    let mut out = Vec::with_capacity(ctx.f);
    for tau in 0..ctx.f {
        let nt = ctx.tau_next(tau);
        let b = &cp.b[tau];
        let (b_inv, _) = b.inverse(f)?;
        let (h_inv, _) = cp.h[nt].inverse(f)?;
        let d_next = ValuatedSeries::from_truncated(ctx.d_series[nt].clone(), 0);
        let inner = h_inv
            .mul(&cp.y[nt], f)
            .mul(&cp.h[nt], f)
            .scale(&d_next, f)
            .frobenius_substitute(f, ctx.prec);
        let bracket = b
            .euler_derive(f)
            .mul(&b_inv, f)
            .add(&b.mul(&inner, f).mul(&b_inv, f), f)
            .map(|v| v.shift(e));
        // Ad(u^mu): entry (i, j) scales by u^{mu_i - mu_j}
        let mu_e = mu[tau].entries();
        let conj = SeriesMatrix::from_fn(3, |i, j| {
            bracket.at(i, j).shift(mu_e[i] - mu_e[j])
        });
        out.push(conj.sub(&cp.y[tau], f));
    }
    Ok(out)
}

pub fn chart_residual_zero(
    cp: &ChartPoint,
    mu: &[Coweight],
    ctx: &ArithContext,
) -> Result<bool, BkError> {
    let res = chart_residual(cp, mu, ctx)?;
    let mut ok = true;
    for r in res {
        ok &= r.is_zero_mod((ctx.e + 1) as i64).map_err(BkError::Ring)?;
    }
    Ok(ok)
}

/// The printed substitution: X_tau = h_tau u^{mu_tau} B_tau g_tau and
/// N_tau = -h_tau^{-1} Y_tau h_tau, truncated to the monodromy window.
pub fn chart_to_pair(
    cp: &ChartPoint,
    mu: &[Coweight],
    ctx: &ArithContext,
) -> Result<BkPair, BkError> {
    let f = &ctx.field;
    let mut xs = Vec::with_capacity(ctx.f);
    let mut ns = Vec::with_capacity(ctx.f);
    for tau in 0..ctx.f {
        let umu = SeriesMatrix::monomial_diag(mu[tau].entries(), ctx.prec);
        let x = cp.h[tau].mul(&umu, f).mul(&cp.b[tau], f).mul(&cp.g[tau], f);
        let (h_inv, _) = cp.h[tau].inverse(f)?;
        let n_raw = h_inv.mul(&cp.y[tau], f).mul(&cp.h[tau], f);
        let bound = (ctx.e + 1) as i64;
        let n = n_raw.map(|v| {
            let w = v.window(0, bound.min(v.known_prec())).unwrap_or_else(|_| {
                crate::ring::TruncatedSeries::zero(0)
            });
            ValuatedSeries::from_truncated(w.neg(f), 0)
        });
        xs.push(x);
        ns.push(n);
    }
    BkPair::new(ctx, xs, ns)
}

/// Diagnostic comparing the chart condition against the pair congruence on
/// the same underlying data. The reported discrepancy per embedding is
/// Delta = -R_pair - c h R_chart h^{-1} (mod u^{e+1}), together with the two
/// candidate correction terms c u^e diag(mu) and c u^e h^{-1} dh.
#[derive(Clone, Debug)]
pub struct ChartCompare {
    pub chart_zero: Vec<bool>,
    pub pair_zero: Vec<bool>,
    pub discrepancy: Vec<SeriesMatrix>,
    /// Delta equals c(u) u^e diag(mu) modulo u^{e+1}.
    pub matches_diag_term: Vec<bool>,
    /// The dlog correction c u^e h^{-1} dh vanishes modulo u^{e+1} (it always
    /// should: dh has positive valuation).
    pub dlog_term_vanishes: Vec<bool>,
}

pub fn compare_chart_vs_pair(
    cp: &ChartPoint,
    mu: &[Coweight],
    ctx: &ArithContext,
) -> Result<ChartCompare, BkError> {
    let f = &ctx.field;
    let e = ctx.e as i64;
    let bound = e + 1;
    let r_chart = chart_residual(cp, mu, ctx)?;
    let pair = chart_to_pair(cp, mu, ctx)?;
    let r_pair = super::pair::monodromy_residual(&pair, ctx)?;
    let mut cmp = ChartCompare {
        chart_zero: Vec::new(),
        pair_zero: Vec::new(),
        discrepancy: Vec::new(),
        matches_diag_term: Vec::new(),
        dlog_term_vanishes: Vec::new(),
    };
    for tau in 0..ctx.f {
        let c = ValuatedSeries::from_truncated(ctx.c[tau].clone(), 0);
        cmp.chart_zero
            .push(r_chart[tau].is_zero_mod(bound).map_err(BkError::Ring)?);
        cmp.pair_zero
            .push(r_pair[tau].is_zero_mod(bound).map_err(BkError::Ring)?);
        let h = &cp.h[tau];
        let (h_inv, _) = h.inverse(f)?;
        let delta = r_pair[tau]
            .add(&h.mul(&r_chart[tau], f).mul(&h_inv, f).scale(&c, f), f)
            .map(|v| v.neg(f));
        let diag_term = SeriesMatrix::monomial_diag(&[0, 0, 0], ctx.prec)
            .map(|v| v.shift(e))
            .scale(&c, f);
        let diag_term = SeriesMatrix::from_fn(3, |i, j| {
            if i == j {
                diag_term
                    .at(i, j)
                    .scale(f.from_int(mu[tau].entries()[i]), f)
            } else {
                diag_term.at(i, j).clone()
            }
        });
        let dlog = h_inv.mul(&h.euler_derive(f), f).map(|v| v.shift(e)).scale(&c, f);
        cmp.matches_diag_term.push(
            delta
                .sub(&diag_term, f)
                .is_zero_mod(bound)
                .map_err(BkError::Ring)?,
        );
        cmp.dlog_term_vanishes
            .push(dlog.is_zero_mod(bound).map_err(BkError::Ring)?);
        cmp.discrepancy.push(delta);
    }
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::Rng;

    fn ctx5() -> ArithContext {
        ArithContext::standard(5, 1, 1, 2).unwrap()
    }

    fn trivial_chart(ctx: &ArithContext) -> ChartPoint {
        ChartPoint {
            h: vec![SeriesMatrix::identity(3, ctx.prec); ctx.f],
            b: vec![SeriesMatrix::identity(3, ctx.prec); ctx.f],
            y: vec![SeriesMatrix::zero(3, ctx.prec as i64); ctx.f],
            g: vec![SeriesMatrix::identity(3, ctx.prec); ctx.f],
        }
    }

    fn rand_unit_matrix(ctx: &ArithContext, rng: &mut Rng, deg: usize) -> SeriesMatrix {
        loop {
            let m = SeriesMatrix::from_fn(3, |_, _| {
                let mut ts = crate::ring::TruncatedSeries::zero(ctx.prec);
                for c in ts.coeffs.iter_mut().take(deg + 1) {
                    *c = ctx.fq(rng.below(ctx.q() as u64) as i64);
                }
                ValuatedSeries::from_truncated(ts, 0)
            });
            if let Some(v) = m.det(&ctx.field).valuation() {
                if v == 0 {
                    return m;
                }
            }
        }
    }

    fn rand_y(ctx: &ArithContext, rng: &mut Rng) -> SeriesMatrix {
        SeriesMatrix::from_fn(3, |r, c| {
            if r > c {
                let mut ts = crate::ring::TruncatedSeries::zero(ctx.prec);
                for i in 1..=ctx.e {
                    ts.coeffs[i] = ctx.fq(rng.below(ctx.q() as u64) as i64);
                }
                ValuatedSeries::from_truncated(ts, 0)
            } else {
                ValuatedSeries::zero(ctx.prec as i64)
            }
        })
    }

    #[test]
    fn trivial_chart_residuals_vanish() {
        let ctx = ctx5();
        let mu = vec![Coweight::from_slice(&[0, 0, 0])];
        let cp = trivial_chart(&ctx);
        cp.validate(&mu, &ctx).unwrap();
        assert!(chart_residual_zero(&cp, &mu, &ctx).unwrap());
        let pair = chart_to_pair(&cp, &mu, &ctx).unwrap();
        assert!(super::super::pair::is_bk_point(&pair, &ctx).unwrap());
    }

    #[test]
    fn chart_to_pair_substitution_examples() {
        let ctx = ctx5();
        let mu = vec![Coweight::from_slice(&[2, 1, 0])];
        let cp = trivial_chart(&ctx);
        let pair = chart_to_pair(&cp, &mu, &ctx).unwrap();
        assert_eq!(pair.x[0].at(0, 0).valuation(), Some(2));
        assert_eq!(pair.x[0].at(1, 1).valuation(), Some(1));
        assert_eq!(pair.x[0].at(2, 2).valuation(), Some(0));
        // permutation framing permutes columns
        let mut cp2 = trivial_chart(&ctx);
        let w0 = [0, 0, 1, 0, 1, 0, 1, 0, 0].map(|v: i64| ctx.fq(v));
        cp2.g = vec![SeriesMatrix::from_consts(3, &w0, ctx.prec)];
        let pair2 = chart_to_pair(&cp2, &mu, &ctx).unwrap();
        assert_eq!(pair2.x[0].at(0, 2).valuation(), Some(2));
        assert_eq!(pair2.x[0].at(2, 0).valuation(), Some(0));
    }

    #[test]
    fn chart_with_free_cell_coordinates_stays_in_locus() {
        // e=1, p=5, mu=(2,1,0): any unit h, x0, y0, z0 arbitrary, z1 = 0,
        // Y = 0 solves the chart condition (phi terms sit above u^2)
        let ctx = ctx5();
        let mu = vec![Coweight::from_slice(&[2, 1, 0])];
        let mut rng = Rng::new(2024);
        for _ in 0..20 {
            let mut cp = trivial_chart(&ctx);
            let mut b = SeriesMatrix::identity(3, ctx.prec);
            b.set(1, 0, ValuatedSeries::from_const(ctx.fq(rng.below(5) as i64), ctx.prec));
            b.set(2, 1, ValuatedSeries::from_const(ctx.fq(rng.below(5) as i64), ctx.prec));
            b.set(2, 0, ValuatedSeries::from_const(ctx.fq(rng.below(5) as i64), ctx.prec));
            cp.b = vec![b];
            cp.h = vec![rand_unit_matrix(&ctx, &mut rng, 3)];
            cp.validate(&mu, &ctx).unwrap();
            assert!(chart_residual_zero(&cp, &mu, &ctx).unwrap());
        }
        // while Y_alpha = u breaks it
        let mut cp = trivial_chart(&ctx);
        let mut y = SeriesMatrix::zero(3, ctx.prec as i64);
        y.set(1, 0, ValuatedSeries::monomial(Fq::ONE, 1, ctx.prec));
        cp.y = vec![y];
        assert!(!chart_residual_zero(&cp, &mu, &ctx).unwrap());
    }

    #[test]
    fn compare_flags_diag_discrepancy() {
        let ctx = ctx5();
        let mu = vec![Coweight::from_slice(&[2, 1, 0])];
        let cp = trivial_chart(&ctx);
        let cmp = compare_chart_vs_pair(&cp, &mu, &ctx).unwrap();
        assert!(cmp.chart_zero[0]);
        assert!(!cmp.pair_zero[0]);
        assert!(cmp.matches_diag_term[0]);
        assert!(cmp.dlog_term_vanishes[0]);
        // pair residual is the diagonal -c(0) diag(2,1,0) u
        let pair = chart_to_pair(&cp, &mu, &ctx).unwrap();
        let res = super::super::pair::monodromy_residual(&pair, &ctx).unwrap();
        let c0 = ctx.fq(2);
        assert_eq!(
            res[0].at(0, 0).coeff(1),
            Some(ctx.field.neg(ctx.field.mul(c0, ctx.fq(2))))
        );
    }

    #[test]
    fn mu_zero_cell_chart_iff_pair() {
        // on the mu = 0 cell both conditions agree on random chart points
        let ctx = ctx5();
        let mu = vec![Coweight::from_slice(&[0, 0, 0])];
        let mut rng = Rng::new(99);
        let mut zero_count = 0;
        for _ in 0..200 {
            let mut cp = trivial_chart(&ctx);
            cp.h = vec![rand_unit_matrix(&ctx, &mut rng, 2)];
            cp.y = vec![rand_y(&ctx, &mut rng)];
            cp.validate(&mu, &ctx).unwrap();
            let cmp = compare_chart_vs_pair(&cp, &mu, &ctx).unwrap();
            assert_eq!(cmp.chart_zero[0], cmp.pair_zero[0]);
            if cmp.chart_zero[0] {
                zero_count += 1;
            }
        }
        // the locus is Y = 0 at this size, so most samples are nonzero
        assert!(zero_count < 10);
    }

    #[test]
    fn mu_zero_cell_two_embeddings() {
        // with f = 2 the chart couples the embeddings; the agreement on the
        // mu = 0 cell must hold per embedding
        let ctx = ArithContext::new(5, 1, 1, 2, 2, 3, &[vec![1]]).unwrap();
        let mu = vec![Coweight::from_slice(&[0, 0, 0]); 2];
        let mut rng = Rng::new(17);
        for _ in 0..100 {
            let cp = ChartPoint {
                h: vec![
                    rand_unit_matrix(&ctx, &mut rng, 2),
                    rand_unit_matrix(&ctx, &mut rng, 2),
                ],
                b: vec![SeriesMatrix::identity(3, ctx.prec); 2],
                y: vec![rand_y(&ctx, &mut rng), rand_y(&ctx, &mut rng)],
                g: vec![SeriesMatrix::identity(3, ctx.prec); 2],
            };
            cp.validate(&mu, &ctx).unwrap();
            let cmp = compare_chart_vs_pair(&cp, &mu, &ctx).unwrap();
            for tau in 0..2 {
                assert_eq!(cmp.chart_zero[tau], cmp.pair_zero[tau], "tau = {tau}");
            }
        }
    }
}

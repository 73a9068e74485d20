//! Genericity of the transported derivation and the search for a chain
//! perturbation that breaks stability. The allowed perturbations are the
//! constant upper unipotents (when the step difference is not central) or
//! the two simple-pole families (when it is); the search is exhaustive over
//! the finite parameter space.

use super::chain::n0phi_matrix;
use super::pair::BkPair;
use super::BkError;
use crate::grassmann::Coweight;
use crate::ring::{ArithContext, Fq, SeriesMatrix, ValuatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenericityFlavor {
    /// Exact valuations on the (1,2) and (2,3) entries.
    AlphaBeta,
    /// Exact valuations on the (1,2) and (1,3) entries.
    AlphaGamma,
    /// Exact valuations on the (2,3) and (1,3) entries.
    BetaGamma,
}

/// The matrix of u^i N_0^phi in the chain basis `gamma` must be upper
/// triangular with the designated entries at exactly the stated valuations
/// i + 1 - <alpha/beta/gamma, mu^(i)>.
pub fn genericity_check(
    pair: &BkPair,
    gamma: &SeriesMatrix,
    i: usize,
    flavor: GenericityFlavor,
    mu_i: &Coweight,
    tau: usize,
    ctx: &ArithContext,
) -> Result<bool, BkError> {
    let y = n0phi_matrix(pair, gamma, i + 1, tau, ctx)?;
    // upper triangular with diagonal in u^i F[[u]], within the window where
    // the operator is defined
    let window = (ctx.e * ctx.p as usize + i) as i64;
    for r in 0..3 {
        for c in 0..r {
            if let Some(v) = y.at(r, c).valuation() {
                if v < window {
                    return Ok(false);
                }
            }
        }
        if let Some(v) = y.at(r, r).valuation() {
            if v < i as i64 {
                return Ok(false);
            }
        }
    }
    let val_eq = |r: usize, c: usize, want: i64| -> bool {
        match y.at(r, c).valuation() {
            Some(v) => v == want,
            None => false,
        }
    };
    let i = i as i64;
    let (a, b) = match flavor {
        GenericityFlavor::AlphaBeta => (
            val_eq(0, 1, i + 1 - mu_i.alpha()),
            val_eq(1, 2, i + 1 - mu_i.beta()),
        ),
        GenericityFlavor::AlphaGamma => (
            val_eq(0, 1, i + 1 - mu_i.alpha()),
            val_eq(0, 2, i + 1 - mu_i.gamma()),
        ),
        GenericityFlavor::BetaGamma => (
            val_eq(1, 2, i + 1 - mu_i.beta()),
            val_eq(0, 2, i + 1 - mu_i.gamma()),
        ),
    };
    Ok(a && b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessFamily {
    Identity,
    ConstantUnipotent,
    PoleAlpha,
    PoleBeta,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub family: WitnessFamily,
    pub g: SeriesMatrix,
    /// The level at which stability fails.
    pub level: usize,
}

fn constant_unipotent(ctx: &ArithContext, x: Fq, y: Fq, z: Fq) -> SeriesMatrix {
    let mut m = SeriesMatrix::identity(3, ctx.prec);
    m.set(0, 1, ValuatedSeries::from_const(x, ctx.prec).restrict_zero(x));
    m.set(0, 2, ValuatedSeries::from_const(y, ctx.prec).restrict_zero(y));
    m.set(1, 2, ValuatedSeries::from_const(z, ctx.prec).restrict_zero(z));
    m
}

trait RestrictZero {
    fn restrict_zero(self, c: Fq) -> Self;
}

impl RestrictZero for ValuatedSeries {
    fn restrict_zero(self, c: Fq) -> Self {
        if c.is_zero() {
            ValuatedSeries::zero(self.known_prec())
        } else {
            self
        }
    }
}

fn pole_family(ctx: &ArithContext, alpha_side: bool, x: Fq, y: Fq) -> SeriesMatrix {
    let mut m = SeriesMatrix::identity(3, ctx.prec);
    if alpha_side {
        m.set(0, 1, ValuatedSeries::monomial(x, -1, ctx.prec));
        m.set(0, 2, ValuatedSeries::monomial(y, -1, ctx.prec));
    } else {
        m.set(0, 2, ValuatedSeries::monomial(y, -1, ctx.prec));
        m.set(1, 2, ValuatedSeries::monomial(x, -1, ctx.prec));
    }
    m
}

/// Stability fails at level i for the basis G of M_i: the matrix of
/// u^i N_0^phi has an entry of valuation <= 0.
fn stability_fails(
    pair: &BkPair,
    g: &SeriesMatrix,
    i: usize,
    tau: usize,
    ctx: &ArithContext,
) -> Result<bool, BkError> {
    let y = n0phi_matrix(pair, g, i + 1, tau, ctx)?;
    for r in 0..3 {
        for c in 0..3 {
            if let Some(v) = y.at(r, c).valuation() {
                if v <= 0 {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Search for g in the allowed family so that the chain
/// gamma_i = gamma_{i+1} [g at i = k] u^{mu^(i) - mu^(i+1)}
/// fails stability at level k or k + 1. `gamma_top` expresses the basis of
/// the top level e in the base basis; `profiles[i-1]` is the target
/// mu^(i) for 1 <= i <= e.
pub fn failure_witness(
    pair: &BkPair,
    gamma_top: &SeriesMatrix,
    profiles: &[Coweight],
    k: usize,
    tau: usize,
    ctx: &ArithContext,
) -> Result<Witness, BkError> {
    let f = &ctx.field;
    let e = ctx.e;
    assert!(k >= 1 && k < e);
    let mu_k = &profiles[k - 1];
    let mu_k1 = &profiles[k];
    let expect = Coweight::new(vec![2 * k as i64, k as i64, 0]);
    if mu_k != &expect {
        return Err(BkError::PreconditionFailed(format!(
            "mu^({k}) must be (2k, k, 0), got {:?}",
            mu_k.entries()
        )));
    }
    let top_expect = Coweight::new(vec![2 * (k as i64 + 1), k as i64 + 1, 0]);
    if mu_k1 == &top_expect {
        return Err(BkError::PreconditionFailed(
            "mu^(k+1) equals the extreme profile; nothing can fail".into(),
        ));
    }
    // walk down from the top level to k+1 along monomial differences
    let mut g_level = gamma_top.clone();
    for i in (k + 1..e).rev() {
        let diff: Vec<i64> = profiles[i - 1]
            .entries()
            .iter()
            .zip(profiles[i].entries())
            .map(|(a, b)| a - b)
            .collect();
        g_level = g_level.mul(&SeriesMatrix::monomial_diag(&diff, ctx.prec), f);
    }
    // level k+1 basis reached; stability may already fail there with g = 1
    if stability_fails(pair, &g_level, k + 1, tau, ctx)? {
        return Ok(Witness {
            family: WitnessFamily::Identity,
            g: SeriesMatrix::identity(3, ctx.prec),
            level: k + 1,
        });
    }
    let nu: Vec<i64> = mu_k1
        .entries()
        .iter()
        .zip(mu_k.entries())
        .map(|(a, b)| a - b)
        .collect();
    let central = nu == [1, 1, 1];
    let step_down = SeriesMatrix::monomial_diag(
        &mu_k
            .entries()
            .iter()
            .zip(mu_k1.entries())
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
        ctx.prec,
    );
    let q = ctx.q() as u64;
    let eta = Coweight::from_slice(&[2, 1, 0]);
    let try_g = |g: SeriesMatrix, family: WitnessFamily| -> Result<Option<Witness>, BkError> {
        let g_k = g_level.mul(&g, f).mul(&step_down, f);
        // the perturbed level must still be a sublattice of the base with
        // its step inside the allowed cone
        if !g_k.is_integral() {
            return Ok(None);
        }
        let (gk_inv, _) = g_k.inverse(f)?;
        let step = gk_inv.mul(&g_level, f);
        if !step.is_integral() {
            return Ok(None);
        }
        if !step.elementary_divisors(f)?.dominance_leq(&eta) {
            return Ok(None);
        }
        if stability_fails(pair, &g_k, k, tau, ctx)? {
            return Ok(Some(Witness { family, g, level: k }));
        }
        Ok(None)
    };
    if central {
        for alpha_side in [true, false] {
            for xc in 0..q {
                for yc in 0..q {
                    let g = pole_family(ctx, alpha_side, Fq(xc as u16), Fq(yc as u16));
                    let fam = if alpha_side {
                        WitnessFamily::PoleAlpha
                    } else {
                        WitnessFamily::PoleBeta
                    };
                    if let Some(w) = try_g(g, fam)? {
                        return Ok(w);
                    }
                }
            }
        }
    } else {
        for xc in 0..q {
            for yc in 0..q {
                for zc in 0..q {
                    let g = constant_unipotent(ctx, Fq(xc as u16), Fq(yc as u16), Fq(zc as u16));
                    if let Some(w) = try_g(g, WitnessFamily::ConstantUnipotent)? {
                        return Ok(w);
                    }
                }
            }
        }
    }
    Err(BkError::NoWitnessFound)
}

//! Convolution chains: flags M_e < ... < M_0 recorded by per-step basis
//! matrices, the transported derivation matrix at each level, the stability
//! condition (A_i), the Pluecker condition (B_i), and exhaustive fiber
//! enumeration at desk scale.

use super::pair::BkPair;
use super::BkError;
use crate::grassmann::{
    enumerate_ustable_lattices, s_locus_check, Coweight, DerivationData, Lattice,
};
use crate::ring::{ArithContext, SeriesMatrix, ValuatedSeries};

/// Steps are indexed steps[tau][i-1] for level i in 1..=e; the cumulative
/// transform through level i expresses the basis of M_i in the base basis.
#[derive(Clone, Debug)]
pub struct ConvChain {
    pub steps: Vec<Vec<SeriesMatrix>>,
}

impl ConvChain {
    pub fn levels(&self) -> usize {
        self.steps.first().map_or(0, |s| s.len())
    }

    /// Product of the first i step matrices (i = 0 gives the identity).
    pub fn cumulative(&self, ctx: &ArithContext, tau: usize, i: usize) -> SeriesMatrix {
        let mut acc = SeriesMatrix::identity(ctx.d, ctx.prec);
        for s in &self.steps[tau][..i] {
            acc = acc.mul(s, &ctx.field);
        }
        acc
    }

    /// Per-step exponent profile: elementary divisors of the cumulative
    /// transform at each level.
    pub fn profiles(&self, ctx: &ArithContext, tau: usize) -> Result<Vec<Coweight>, BkError> {
        (1..=self.levels())
            .map(|i| {
                self.cumulative(ctx, tau, i)
                    .elementary_divisors(&ctx.field)
                    .map_err(BkError::Ring)
            })
            .collect()
    }

    /// Chain invariants relative to a pair: every step within the (2,1,0)
    /// cone, dominant profiles below (2i, i, 0), and the top level equal to
    /// the distinguished sublattice of the pair as a lattice.
    pub fn validate(&self, pair: &BkPair, ctx: &ArithContext) -> Result<(), BkError> {
        let f = &ctx.field;
        let eta = Coweight::from_slice(&[2, 1, 0]);
        for tau in 0..ctx.f {
            for (idx, s) in self.steps[tau].iter().enumerate() {
                let div = s.elementary_divisors(f)?;
                if !div.dominance_leq(&eta) {
                    return Err(BkError::NotInCone(format!(
                        "step {} at embedding {tau} has type {:?}",
                        idx + 1,
                        div.entries()
                    )));
                }
            }
            let profs = self.profiles(ctx, tau)?;
            for (i, mu_i) in profs.iter().enumerate() {
                let bound = Coweight::new(vec![2 * (i as i64 + 1), i as i64 + 1, 0]);
                if !mu_i.is_dominant() || !mu_i.dominance_leq(&bound) {
                    return Err(BkError::NotInCone(format!(
                        "profile at level {} is {:?}",
                        i + 1,
                        mu_i.entries()
                    )));
                }
            }
            let top = self.cumulative(ctx, tau, self.levels());
            let want = top_step_matrix(pair, ctx, tau)?;
            let lat_top = Lattice::from_series_matrix(f, &top, 2 * ctx.e * ctx.h)
                .map_err(BkError::Grassmann)?;
            let lat_want = Lattice::from_series_matrix(f, &want, 2 * ctx.e * ctx.h)
                .map_err(BkError::Grassmann)?;
            if lat_top != lat_want {
                return Err(BkError::NotInCone(
                    "chain does not terminate at the distinguished sublattice".into(),
                ));
            }
        }
        Ok(())
    }
}

/// u^{e h} X_tau^{-1}: the matrix expressing the distinguished sublattice in
/// the base basis.
pub fn top_step_matrix(
    pair: &BkPair,
    ctx: &ArithContext,
    tau: usize,
) -> Result<SeriesMatrix, BkError> {
    let (x_inv, _) = pair.x[tau].inverse(&ctx.field)?;
    Ok(x_inv.map(|v| v.shift((ctx.e * ctx.h) as i64)))
}

/// Matrix of u^{i-1} N_0^phi in the basis beta_0 * G:
/// G^{-1} u^{i-1} [phi(N_{tau+1}) G + c_tau dG], where dG is u dG/du.
pub fn n0phi_matrix(
    pair: &BkPair,
    g: &SeriesMatrix,
    i: usize,
    tau: usize,
    ctx: &ArithContext,
) -> Result<SeriesMatrix, BkError> {
    assert!(i >= 1);
    let f = &ctx.field;
    let (g_inv, _) = g.inverse(f)?;
    let n_next = pair.n[ctx.tau_next(tau)].frobenius_substitute(f, ctx.prec);
    let c = ValuatedSeries::from_truncated(ctx.c[tau].clone(), 0);
    let inner = n_next.mul(g, f).add(&g.euler_derive(f).scale(&c, f), f);
    Ok(g_inv.mul(&inner, f).map(|v| v.shift(i as i64 - 1)))
}

/// (A_i): the transported derivation matrix at level i is integral, the
/// computation carried modulo u^{e p + i}.
pub fn check_a(chain: &ConvChain, pair: &BkPair, i: usize, ctx: &ArithContext) -> Result<bool, BkError> {
    for tau in 0..ctx.f {
        let g = chain.cumulative(ctx, tau, i);
        let y = n0phi_matrix(pair, &g, i, tau, ctx)?;
        if !matrix_integral_below(&y, (ctx.e * ctx.p as usize + i) as i64)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Integrality of all entries, only inspecting coefficients below `cap`.
fn matrix_integral_below(m: &SeriesMatrix, cap: i64) -> Result<bool, BkError> {
    for r in 0..m.d {
        for c in 0..m.d {
            let e = m.at(r, c);
            if e.known_prec() < 0.min(cap) {
                return Err(BkError::Ring(crate::ring::RingError::PrecisionExhausted(
                    "cannot decide integrality".into(),
                )));
            }
            if let Some(v) = e.valuation() {
                if v < 0 && v < cap {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// (B_i) at embedding tau: assumes (A_{i-1}) (automatic at i = 1), builds the
/// step lattice and the transported derivation modulo u^h, and runs the
/// locus check with Hodge bound (2,1,0) and scalar c(u) u^{i-1}.
pub fn check_b(
    chain: &ConvChain,
    pair: &BkPair,
    i: usize,
    tau: usize,
    ctx: &ArithContext,
) -> Result<bool, BkError> {
    assert!(i >= 1);
    if i >= 2 && !check_a(chain, pair, i - 1, ctx)? {
        return Err(BkError::PreconditionFailed(format!(
            "stability at level {} does not hold",
            i - 1
        )));
    }
    let f = &ctx.field;
    let g_prev = chain.cumulative(ctx, tau, i - 1);
    let nmat = n0phi_matrix(pair, &g_prev, i, tau, ctx)?;
    // reduce to the u^h window; (A_{i-1}) makes this integral and divisible by u
    let h = ctx.h;
    let nmat_h = SeriesMatrix::from_fn(ctx.d, |r, c| {
        let w = nmat
            .at(r, c)
            .window(0, h as i64)
            .expect("window within working precision");
        ValuatedSeries::from_truncated(w, 0)
    });
    if let Some(v) = nmat_h.min_valuation() {
        if v < 1 {
            return Err(BkError::PreconditionFailed(
                "derivation matrix not divisible by u at this level".into(),
            ));
        }
    }
    let step = &chain.steps[tau][i - 1];
    let lattice = Lattice::from_series_matrix(f, step, h).map_err(BkError::Grassmann)?;
    let data = DerivationData {
        n0: nmat_h,
        scalar: ctx.c[tau].clone(),
    };
    s_locus_check(f, &lattice, &data, i, &Coweight::from_slice(&[2, 1, 0]))
        .map_err(BkError::Grassmann)
}

/// dim of the iterated fiber: <rho, sum(lambda) - nu> for d = 3.
pub fn conv_fiber_dim_formula(lambdas: &[Coweight], nu: &Coweight) -> i64 {
    let mut total = lambdas[0].clone();
    for l in &lambdas[1..] {
        total = total.add(l);
    }
    total.sub(nu).rho_pairing_d3()
}

/// All chains over F_q below the given pair: every step within the (2,1,0)
/// cone and the top level equal to the distinguished sublattice. The budget
/// bounds the number of intermediate lattices inspected.
pub fn conv_fiber_enumerate(
    pair: &BkPair,
    ctx: &ArithContext,
    budget: u64,
) -> Result<Vec<ConvChain>, BkError> {
    assert_eq!(ctx.h, 2, "enumeration is implemented for h = 2");
    let f = &ctx.field;
    let e = ctx.e;
    let mut per_tau: Vec<Vec<Vec<SeriesMatrix>>> = Vec::with_capacity(ctx.f);
    let mut inspected: u64 = 0;
    // candidate steps are lattices between u^2 M and M, i.e. u-stable
    // colength-3 subspaces of V_2
    let candidates = enumerate_ustable_lattices(f, ctx.d, 2, ctx.d * 2 - 3);
    let eta = Coweight::from_slice(&[2, 1, 0]);
    for tau in 0..ctx.f {
        let top = top_step_matrix(pair, ctx, tau)?;
        let mut complete: Vec<Vec<SeriesMatrix>> = Vec::new();
        // stack of (steps so far, cumulative inverse * top)
        let mut stack: Vec<(Vec<SeriesMatrix>, SeriesMatrix)> = vec![(Vec::new(), top.clone())];
        while let Some((steps, rest)) = stack.pop() {
            let level = steps.len() + 1;
            if level == e {
                // the last step is forced: it must be `rest` itself
                let div = rest.elementary_divisors(f)?;
                if div.dominance_leq(&eta) {
                    let mut full = steps.clone();
                    full.push(rest);
                    complete.push(full);
                }
                continue;
            }
            for cand in &candidates {
                inspected += 1;
                if inspected > budget {
                    return Err(BkError::BudgetExceeded(format!(
                        "inspected more than {budget} intermediate lattices"
                    )));
                }
                if !cand.schubert_member(f, &eta).map_err(BkError::Grassmann)? {
                    continue;
                }
                let s = cand.basis_matrix(f, ctx.prec);
                let (s_inv, _) = s.inverse(f)?;
                let next_rest = s_inv.mul(&rest, f);
                // the remaining flag must still contain the top lattice
                if !next_rest.is_integral() {
                    continue;
                }
                let mut st = steps.clone();
                st.push(s);
                stack.push((st, next_rest));
            }
        }
        per_tau.push(complete);
    }
    // cartesian product across embeddings
    let mut chains = vec![ConvChain { steps: Vec::new() }];
    for tau_chains in per_tau {
        let mut next = Vec::new();
        for base in &chains {
            for tc in &tau_chains {
                let mut steps = base.steps.clone();
                steps.push(tc.clone());
                next.push(ConvChain { steps });
            }
        }
        chains = next;
        if chains.len() as u64 > budget {
            return Err(BkError::BudgetExceeded("chain product too large".into()));
        }
    }
    Ok(chains)
}

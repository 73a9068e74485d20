//! Torus-fixed chains and the one-parameter move that connects a chain with
//! a central step to an extremal one: the step above a diag(u^2,u,1)-type
//! step is rotated through t/u, and the limit endpoints are written out
//! explicitly.

use super::chain::ConvChain;
use super::BkError;
use crate::ring::{ArithContext, Fq, SeriesMatrix, ValuatedSeries};

/// A step is monomial when it is diagonal with exact monomial entries.
fn monomial_exponents(step: &SeriesMatrix) -> Option<Vec<i64>> {
    let d = step.d;
    let mut exps = Vec::with_capacity(d);
    for i in 0..d {
        for j in 0..d {
            let e = step.at(i, j);
            if i == j {
                let v = e.valuation()?;
                // a single nonzero coefficient
                let unit = e.unit_part();
                if unit.coeffs[1..].iter().any(|c| !c.is_zero()) {
                    return None;
                }
                exps.push(v);
            } else if !e.is_zero() {
                return None;
            }
        }
    }
    Some(exps)
}

/// Every step diagonal-monomial with exponents a permutation of (2,1,0).
pub fn extremal_check(chain: &ConvChain) -> bool {
    chain.steps.iter().all(|steps| {
        steps.iter().all(|s| {
            monomial_exponents(s).is_some_and(|mut e| {
                e.sort_unstable_by(|a, b| b.cmp(a));
                e == [2, 1, 0]
            })
        })
    })
}

#[derive(Clone, Debug)]
pub struct DegenerationFamily {
    /// The modified chain at each finite parameter value.
    pub at: Vec<(Fq, ConvChain)>,
    /// The limit chain, with both affected steps extremal.
    pub infinity: ConvChain,
}

/// Rotate the submodule at position i (1-based) of a monomial chain whose
/// step i is central u*I and whose step i-1 is a permutation of
/// diag(u^2, u, 1). Returns the chain at every t in F_q together with the
/// explicit limit endpoint.
pub fn degeneration_family(
    chain: &ConvChain,
    i: usize,
    tau: usize,
    ctx: &ArithContext,
) -> Result<DegenerationFamily, BkError> {
    let f = &ctx.field;
    if i < 2 || i > chain.levels() {
        return Err(BkError::MoveNotApplicable(format!(
            "position {i} needs a predecessor step"
        )));
    }
    let steps = &chain.steps[tau];
    let central = monomial_exponents(&steps[i - 1])
        .is_some_and(|e| e == vec![1, 1, 1]);
    if !central {
        return Err(BkError::MoveNotApplicable(format!(
            "step {i} is not central u * identity"
        )));
    }
    let Some(prev) = monomial_exponents(&steps[i - 2]) else {
        return Err(BkError::MoveNotApplicable(format!(
            "step {} is not monomial",
            i - 1
        )));
    };
    let mut sorted = prev.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    if sorted != [2, 1, 0] {
        return Err(BkError::MoveNotApplicable(format!(
            "step {} has exponents {prev:?}, need a permutation of (2,1,0)",
            i - 1
        )));
    }
    let a = prev.iter().position(|&x| x == 1).unwrap();
    let b = prev.iter().position(|&x| x == 0).unwrap();

    let mut family = Vec::new();
    for t in 0..ctx.q() as u16 {
        let t = Fq(t);
        // step_{i-1} <- (I + t E_ab) step_{i-1};  step_i <- u I - t E_ab
        let mut u_t = SeriesMatrix::identity(3, ctx.prec);
        if !t.is_zero() {
            u_t.set(a, b, ValuatedSeries::from_const(t, ctx.prec));
        }
        let new_prev = u_t.mul(&steps[i - 2], f);
        let mut new_cent = SeriesMatrix::monomial_diag(&[1, 1, 1], ctx.prec);
        if !t.is_zero() {
            new_cent.set(a, b, ValuatedSeries::from_const(f.neg(t), ctx.prec));
        }
        let mut new_steps = steps.clone();
        new_steps[i - 2] = new_prev;
        new_steps[i - 1] = new_cent;
        let mut all = chain.steps.clone();
        all[tau] = new_steps;
        family.push((t, ConvChain { steps: all }));
    }

    // limit: exponents 1 and 0 swap in step i-1; step i becomes the
    // complementary permutation of (2,1,0)
    let mut inf_prev_exp = prev.clone();
    inf_prev_exp[a] = 0;
    inf_prev_exp[b] = 1;
    let inf_prev = SeriesMatrix::monomial_diag(&inf_prev_exp, ctx.prec);
    let mut inf_cent_exp = vec![1i64; 3];
    inf_cent_exp[a] = 2;
    inf_cent_exp[b] = 0;
    let inf_cent = SeriesMatrix::monomial_diag(&inf_cent_exp, ctx.prec);
    let mut new_steps = steps.clone();
    new_steps[i - 2] = inf_prev;
    new_steps[i - 1] = inf_cent;
    let mut all = chain.steps.clone();
    all[tau] = new_steps;
    let infinity = ConvChain { steps: all };

    Ok(DegenerationFamily { at: family, infinity })
}

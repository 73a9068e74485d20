//! Exact fiber point counts. The default route reduces the system first and
//! enumerates only the variables that still appear in equations; the brute
//! force route enumerates everything and is kept as the independent oracle.

use super::plan::{apply_substitutions, default_plan};
use super::poly::Var;
use super::system::{build_equations, GradedPolySystem};
use super::ElimError;
use crate::grassmann::Coweight;
use crate::ring::{ArithContext, Fq, SeriesMatrix};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct FiberCount {
    pub count: u128,
    pub exact: bool,
    /// For sampled runs: (hits, draws) and the 95% confidence radius on the
    /// count implied by the binomial bound.
    pub sampled: Option<(u64, u64)>,
    pub radius: Option<f64>,
    pub free_dim: usize,
    pub seed: u64,
}

fn q_pow(q: u32, e: usize) -> u128 {
    (q as u128).pow(e as u32)
}

/// Count assignments of `vars` satisfying every equation, by exhaustion.
fn count_solutions(
    f: &crate::ring::FieldCtx,
    equations: &[super::system::Equation],
    vars: &[Var],
    q: u32,
) -> u128 {
    let total = q_pow(q, vars.len());
    let mut count = 0u128;
    let mut assign: BTreeMap<Var, Fq> = BTreeMap::new();
    let mut code = 0u128;
    while code < total {
        let mut c = code;
        for &v in vars {
            assign.insert(v, Fq((c % q as u128) as u16));
            c /= q as u128;
        }
        if equations
            .iter()
            .all(|eq| eq.poly.eval(f, &|w| assign[&w]).is_zero())
        {
            count += 1;
        }
        code += 1;
    }
    count
}

/// Exact count of chart points over the fiber: reduce, then enumerate the
/// variables still appearing in the residual equations and scale by the
/// remaining free dimensions. Falls back to seeded sampling when the
/// enumeration exceeds the budget.
pub fn fiber_count(
    mu: &[Coweight],
    ctx: &ArithContext,
    h_spec: &[SeriesMatrix],
    budget: u64,
    seed: u64,
) -> Result<FiberCount, ElimError> {
    let f = &ctx.field;
    let q = ctx.q();
    let sys = build_equations(mu, ctx, h_spec);
    let plan = default_plan(&sys.mu, sys.e, sys.p);
    match apply_substitutions(f, &sys, &plan) {
        Ok((red, _table)) => {
            let nontrivial: Vec<_> = red
                .remaining
                .iter()
                .filter(|eq| !eq.poly.is_zero())
                .cloned()
                .collect();
            let mut in_eqs: Vec<Var> = nontrivial
                .iter()
                .flat_map(|eq| eq.poly.vars())
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            in_eqs.retain(|v| red.free.contains(v));
            let outside = red.free.len() - in_eqs.len();
            if nontrivial.iter().any(|eq| eq.poly.vars().is_empty()) {
                // a nonzero constant equation: empty fiber
                return Ok(FiberCount {
                    count: 0,
                    exact: true,
                    sampled: None,
                    radius: None,
                    free_dim: red.free.len(),
                    seed,
                });
            }
            let space = q_pow(q, in_eqs.len());
            if space <= budget as u128 {
                let sat = count_solutions(f, &nontrivial, &in_eqs, q);
                return Ok(FiberCount {
                    count: sat * q_pow(q, outside),
                    exact: true,
                    sampled: None,
                    radius: None,
                    free_dim: red.free.len(),
                    seed,
                });
            }
            // seeded uniform sampling over the reduced space
            let draws = budget.max(1);
            let mut rng = crate::util::Rng::new(seed);
            let mut hits = 0u64;
            let mut assign: BTreeMap<Var, Fq> = BTreeMap::new();
            for _ in 0..draws {
                for &v in &in_eqs {
                    assign.insert(v, Fq(rng.below(q as u64) as u16));
                }
                if nontrivial
                    .iter()
                    .all(|eq| eq.poly.eval(f, &|w| assign[&w]).is_zero())
                {
                    hits += 1;
                }
            }
            let p_hat = hits as f64 / draws as f64;
            let radius = 1.96 * (p_hat * (1.0 - p_hat) / draws as f64).sqrt()
                * (space as f64)
                * q_pow(q, outside) as f64;
            let count = (p_hat * space as f64) as u128 * q_pow(q, outside);
            Ok(FiberCount {
                count,
                exact: false,
                sampled: Some((hits, draws)),
                radius: Some(radius),
                free_dim: red.free.len(),
                seed,
            })
        }
        Err(_) => brute_force_count(&sys, ctx, budget, seed),
    }
}

/// The independent oracle: enumerate every chart variable and test the full
/// system directly.
pub fn brute_force_count(
    sys: &GradedPolySystem,
    ctx: &ArithContext,
    budget: u64,
    seed: u64,
) -> Result<FiberCount, ElimError> {
    let vars = sys.variables();
    let q = ctx.q();
    let space = q_pow(q, vars.len());
    if space > budget as u128 {
        return Err(ElimError::BudgetExceeded(format!(
            "brute force space {space} exceeds budget {budget}"
        )));
    }
    let count = count_solutions(&ctx.field, &sys.equations, &vars, q);
    Ok(FiberCount {
        count,
        exact: true,
        sampled: None,
        radius: None,
        free_dim: vars.len(),
        seed,
    })
}

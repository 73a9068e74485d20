//! Type I / Type II substitution plans and their application. Type II at
//! index i solves the B-coordinate of that index (the i-multiplier is prime
//! to p); Type I solves the left-hand Y-coordinate whenever the index clears
//! the threshold p(mu_delta - e)/(p - 1). Every recorded expression is
//! checked against the degree-control bound (u-adic weight at most the
//! producing equation index) before being returned.

use super::poly::{Poly, Var};
use super::system::{Delta, Equation, GradedPolySystem};
use super::ElimError;
use crate::ring::FieldCtx;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, Default)]
pub struct SubstitutionPlan {
    /// Type I indices per (tau, delta).
    pub s1: BTreeMap<(usize, Delta), BTreeSet<i64>>,
    /// Type II indices per (tau, delta).
    pub s2: BTreeMap<(usize, Delta), BTreeSet<i64>>,
    /// Case-3 offset per tau.
    pub d_tau: Vec<i64>,
    /// Number of leftover gamma equations per tau.
    pub t_tau: Vec<i64>,
}

/// i clears the Type I threshold: i (p-1) > p (mu_delta - e).
fn type1_eligible(i: i64, mu_delta: i64, e: usize, p: u32) -> bool {
    i * (p as i64 - 1) > p as i64 * (mu_delta - e as i64)
}

/// The printed recipe: full Type I elimination when mu_delta <= e; for
/// gamma above e, Type II at every p-coprime index; for alpha or beta above
/// e, Type II only up to mu_delta - e. Type I is taken on every eligible
/// index not consumed by Type II.
pub fn default_plan(mu: &[crate::grassmann::Coweight], e: usize, p: u32) -> SubstitutionPlan {
    let mut plan = SubstitutionPlan::default();
    for (tau, m) in mu.iter().enumerate() {
        for delta in Delta::ALL {
            let mud = delta.pairing(m);
            let (lo, hi) = GradedPolySystem::eq_range(mud, e);
            let mut s2 = BTreeSet::new();
            if mud > e as i64 {
                let ii_hi = match delta {
                    Delta::Gamma => mud,
                    _ => mud - e as i64,
                };
                for i in 1..=ii_hi {
                    if i % p as i64 != 0 {
                        s2.insert(i);
                    }
                }
            }
            let mut s1 = BTreeSet::new();
            for i in lo..=hi {
                if type1_eligible(i, mud, e, p) && !s2.contains(&i) {
                    s1.insert(i);
                }
            }
            plan.s1.insert((tau, delta), s1);
            plan.s2.insert((tau, delta), s2);
        }
        let ma = m.alpha().max(m.beta());
        let d_off = if ma > e as i64 {
            (ma - e as i64 - p as i64 + 3).div_euclid(p as i64)
                + if (ma - e as i64 - p as i64 + 3).rem_euclid(p as i64) != 0 {
                    1
                } else {
                    0
                }
        } else {
            0
        };
        plan.d_tau.push(d_off);
        let t = (m.gamma() - e as i64).div_euclid(p as i64 - 1).max(0);
        plan.t_tau.push(t);
    }
    plan
}

pub type ExprTable = BTreeMap<Var, Poly>;

#[derive(Clone, Debug)]
pub struct ReducedSystem {
    /// Equations not consumed by any substitution, fully rewritten in the
    /// free variables.
    pub remaining: Vec<Equation>,
    /// Variables not eliminated.
    pub free: Vec<Var>,
}

/// The elimination target of one equation under the plan, if any.
fn target_of(sys: &GradedPolySystem, plan: &SubstitutionPlan, eq: &Equation) -> Option<Var> {
    let mud = eq.delta.pairing(&sys.mu[eq.tau]);
    if plan.s2.get(&(eq.tau, eq.delta)).is_some_and(|s| s.contains(&eq.i)) {
        let bvar = Var::new(eq.delta.b_kind(), eq.tau, eq.i);
        if sys.var_exists(bvar) {
            return Some(bvar);
        }
        // fall through to a Type I solve on the same equation when eligible
        if type1_eligible(eq.i, mud, sys.e, sys.p) {
            let j = eq.i - (mud - sys.e as i64);
            let yvar = Var::new(eq.delta.y_kind(), eq.tau, j.max(0));
            if j >= 1 && sys.var_exists(yvar) {
                return Some(yvar);
            }
        }
        return None;
    }
    if plan.s1.get(&(eq.tau, eq.delta)).is_some_and(|s| s.contains(&eq.i)) {
        let j = eq.i - (mud - sys.e as i64);
        if j >= 1 {
            let yvar = Var::new(eq.delta.y_kind(), eq.tau, j);
            if sys.var_exists(yvar) {
                return Some(yvar);
            }
        }
    }
    None
}

/// Number of free variables after the default plan (the chart dimension
/// bookkeeping quantity).
pub fn remaining_variable_count(mu: &[crate::grassmann::Coweight], e: usize, p: u32) -> usize {
    // build a skeleton system with no coefficients; only ranges matter
    let sys = GradedPolySystem {
        e,
        p,
        f: mu.len(),
        mu: mu.to_vec(),
        equations: Vec::new(),
    };
    let plan = default_plan(mu, e, p);
    let mut eliminated = BTreeSet::new();
    for tau in 0..mu.len() {
        for delta in Delta::ALL {
            let mud = delta.pairing(&mu[tau]);
            let (lo, hi) = GradedPolySystem::eq_range(mud, e);
            for i in lo..=hi {
                let eq = Equation {
                    tau,
                    delta,
                    i,
                    poly: Poly::zero(),
                };
                if let Some(v) = target_of(&sys, &plan, &eq) {
                    eliminated.insert(v);
                }
            }
        }
    }
    sys.variables().len() - eliminated.len()
}

/// Run the plan: each targeted equation is solved for its variable, the
/// expressions are expanded to the free variables (erroring on a cycle), and
/// the unused equations are rewritten. Expressions are verified against the
/// degree-control bound: u-adic weight at most the weight of the variable
/// they replace.
pub fn apply_substitutions(
    f: &FieldCtx,
    sys: &GradedPolySystem,
    plan: &SubstitutionPlan,
) -> Result<(ReducedSystem, ExprTable), ElimError> {
    let mut raw_exprs: BTreeMap<Var, Poly> = BTreeMap::new();
    let mut eq_index: BTreeMap<Var, i64> = BTreeMap::new();
    let mut remaining = Vec::new();
    for eq in &sys.equations {
        match target_of(sys, plan, eq) {
            Some(v) => {
                eq_index.insert(v, eq.i);
                let Some((coeff, rest)) = eq.poly.extract_linear(f, v) else {
                    return Err(ElimError::CyclicDependency(format!(
                        "target {v} occurs nonlinearly"
                    )));
                };
                // the coefficient must be a nonzero constant: i for Type II,
                // -1 (from the left side) possibly plus bracket feedback for
                // Type I; reject anything else as an ill-posed plan
                let cval = if coeff.vars().is_empty() {
                    coeff.eval(f, &|_| crate::ring::Fq::ZERO)
                } else {
                    return Err(ElimError::CyclicDependency(format!(
                        "target {v} has a non-constant coefficient"
                    )));
                };
                if cval.is_zero() {
                    return Err(ElimError::CyclicDependency(format!(
                        "target {v} has vanishing coefficient"
                    )));
                }
                let inv = f.inv(cval).expect("nonzero");
                let expr = rest.scale(f, f.neg(inv));
                raw_exprs.insert(v, expr);
            }
            None => remaining.push(eq.clone()),
        }
    }
    // resolve the table to free variables
    let mut resolved: ExprTable = BTreeMap::new();
    let keys: Vec<Var> = raw_exprs.keys().copied().collect();
    for &v in &keys {
        let mut in_progress = BTreeSet::new();
        resolve(f, v, &raw_exprs, &mut resolved, &mut in_progress)?;
    }
    // degree control: each expression has u-adic weight at most the index of
    // the equation that produced it (which exceeds the target's own weight
    // by mu_delta - e on the Type I side)
    for (v, expr) in &resolved {
        if let Some(w) = expr.max_weight(&|x| x.u_weight()) {
            let bound = eq_index[v];
            assert!(
                w <= bound,
                "degree control violated: {v} received weight {w} from index {bound}"
            );
        }
    }
    // rewrite the unused equations
    let mut rewritten = Vec::new();
    for eq in remaining {
        let mut p = eq.poly.clone();
        loop {
            let vars = p.vars();
            let Some(&v) = vars.iter().find(|v| resolved.contains_key(v)) else {
                break;
            };
            p = p.substitute(f, v, &resolved[&v]);
        }
        rewritten.push(Equation { poly: p, ..eq });
    }
    let free: Vec<Var> = sys
        .variables()
        .into_iter()
        .filter(|v| !resolved.contains_key(v))
        .collect();
    Ok((
        ReducedSystem {
            remaining: rewritten,
            free,
        },
        resolved,
    ))
}

fn resolve(
    f: &FieldCtx,
    v: Var,
    raw: &BTreeMap<Var, Poly>,
    done: &mut ExprTable,
    in_progress: &mut BTreeSet<Var>,
) -> Result<(), ElimError> {
    if done.contains_key(&v) {
        return Ok(());
    }
    if !in_progress.insert(v) {
        return Err(ElimError::CyclicDependency(format!("{v} depends on itself")));
    }
    let mut expr = raw[&v].clone();
    loop {
        let vars = expr.vars();
        let Some(&dep) = vars.iter().find(|d| raw.contains_key(d) && !done.contains_key(d)) else {
            break;
        };
        resolve(f, dep, raw, done, in_progress)?;
        expr = expr.substitute(f, dep, &done[&dep]);
    }
    // substitute the already-resolved ones too
    loop {
        let vars = expr.vars();
        let Some(&dep) = vars.iter().find(|d| done.contains_key(d)) else {
            break;
        };
        expr = expr.substitute(f, dep, &done[&dep]);
    }
    in_progress.remove(&v);
    done.insert(v, expr);
    Ok(())
}

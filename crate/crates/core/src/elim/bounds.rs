//! Closed-form dimension bounds per stratum and the exhaustive integer
//! inequality check backing the unbalanced codimension estimate.

use super::ElimError;
use crate::bk::StratumDescriptor;
use crate::grassmann::Coweight;

/// Sum over embeddings of 3e - n - m, with strictness when any stratum
/// component is unbalanced.
pub fn bound_formula(mu: &[Coweight], e: usize) -> Result<(i64, bool), ElimError> {
    let mut total = 0i64;
    let mut strict = false;
    for m in mu {
        let s = StratumDescriptor::from_mu(m.clone(), e)
            .map_err(|err| ElimError::BadParams(err.to_string()))?;
        total += 3 * e as i64 - s.n - s.m;
        strict |= !s.balanced;
    }
    Ok((total, strict))
}

/// The three quantities E + A, E + B, E + C of the arithmetic claim, for
/// 1 <= x, y < e with y >= 3 and e >= p.
pub fn claim_parts(x: i64, y: i64, e: i64, p: i64) -> (i64, i64, i64) {
    let fl = |a: i64, b: i64| a.div_euclid(b);
    let ceil = |a: i64, b: i64| a.div_euclid(b) + if a.rem_euclid(b) != 0 { 1 } else { 0 };
    let e_term = x - fl(x, p) - fl(x, p - 1) - fl(x + y, p - 1);
    let a = 2 * fl(y - 3, p) + 2;
    let b = 2 * fl(x + e, p) - 2 * ceil(x + 3 - p, p) + 2;
    let c = fl(x + y, p - 1) - ceil(x + 3 - p, p);
    (e_term + a, e_term + b, e_term + c)
}

/// Exhaustively verify E+A > 0, E+B > 0, E+C > 0 over the stated range.
/// Returns the first violation if any.
pub fn verify_claim_inequalities(p: u32, e_max: i64) -> Result<(), (i64, i64, i64)> {
    let p = p as i64;
    for e in p..=e_max {
        for x in 1..e {
            for y in 3..e {
                let (a, b, c) = claim_parts(x, y, e, p);
                if a <= 0 || b <= 0 || c <= 0 {
                    return Err((x, y, e));
                }
            }
        }
    }
    Ok(())
}

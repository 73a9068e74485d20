//! The polynomial congruence C D = G H mod Z^t: exact counting over F_q by
//! summing kernel dimensions of the (D, H)-linear map over all (C, G), and
//! the shape extraction from a stratum coweight.

use super::ElimError;
use crate::grassmann::Coweight;
use crate::ring::{FieldCtx, Fq};

/// Degrees and truncation for the repackaged congruence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbcdShape {
    pub r: i64,
    pub s: i64,
    pub t: i64,
    /// Lowest allowed coefficient index of the degree-s pair (case 3).
    pub offset: i64,
}

/// Read the congruence shape off a stratum coweight: with the larger of the
/// alpha/beta pairings in the role of s (ties to alpha),
/// r = floor((small - 3)/p), s = floor(big/p) - 1,
/// t = floor((mu_gamma - e)/(p-1)), offset = ceil((big - e - p + 3)/p)
/// in the unbalanced case and 0 otherwise.
pub fn abcd_pack(mu: &Coweight, e: usize, p: u32) -> AbcdShape {
    let p = p as i64;
    let e = e as i64;
    let (big, small) = if mu.alpha() >= mu.beta() {
        (mu.alpha(), mu.beta())
    } else {
        (mu.beta(), mu.alpha())
    };
    let r = (small - 3).div_euclid(p);
    let s = big.div_euclid(p) - 1;
    let t = (mu.gamma() - e).div_euclid(p - 1);
    let offset = if big > e {
        let num = big - e - p + 3;
        num.div_euclid(p) + if num.rem_euclid(p) != 0 { 1 } else { 0 }
    } else {
        0
    };
    AbcdShape { r, s, t, offset }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbcdCount {
    pub count: u128,
    /// Max over (C, G)-strata of floor(log_q stratum size) + kernel
    /// dimension: a witnessed lower bound for the affine dimension.
    pub witnessed_dim: i64,
    pub ambient_dim: i64,
}

/// Exact number of (C, G, D, H) with C, G of degree <= r and D, H supported
/// on coefficients offset..=s satisfying C D = G H mod Z^t. Linear in (D, H)
/// for fixed (C, G): the count is a sum of q^{kernel dim}.
pub fn abcd_count(
    f: &FieldCtx,
    shape: AbcdShape,
    budget: u64,
) -> Result<AbcdCount, ElimError> {
    let AbcdShape { r, s, t, offset } = shape;
    if r < 0 || s < 0 || t < 0 || offset < 0 || offset > s {
        return Err(ElimError::BadParams(format!("invalid shape {shape:?}")));
    }
    let q = f.q as u128;
    let nr = (r + 1) as usize; // coefficients of C and of G
    let ns = (s - offset + 1) as usize; // coefficients of D and of H
    let t = t as usize;
    let cg_space = q.pow(2 * nr as u32);
    if cg_space > budget as u128 {
        return Err(ElimError::BudgetExceeded(format!(
            "(C,G) space {cg_space} exceeds budget {budget}"
        )));
    }
    let ambient = 2 * nr as i64 + 2 * ns as i64;
    if t == 0 {
        // no constraint at all
        return Ok(AbcdCount {
            count: q.pow(ambient as u32),
            witnessed_dim: ambient,
            ambient_dim: ambient,
        });
    }
    let mut count: u128 = 0;
    // kernel dimension -> number of (C, G) in that stratum
    let mut strata: std::collections::BTreeMap<usize, u128> = Default::default();
    let mut c_poly = vec![Fq::ZERO; nr];
    let mut g_poly = vec![Fq::ZERO; nr];
    let mut code = 0u128;
    while code < cg_space {
        let mut w = code;
        for v in c_poly.iter_mut().chain(g_poly.iter_mut()) {
            *v = Fq((w % q) as u16);
            w /= q;
        }
        // image of (D, H) -> C D - G H mod Z^t: spanned by the shifts
        // C Z^j and G Z^j for offset <= j <= s, truncated at t
        let mut rows: Vec<Vec<Fq>> = Vec::with_capacity(2 * ns);
        for (poly, _sign) in [(&c_poly, false), (&g_poly, true)] {
            for j in offset..=s {
                let mut row = vec![Fq::ZERO; t];
                for (k, &c) in poly.iter().enumerate() {
                    let deg = k + j as usize;
                    if deg < t {
                        row[deg] = c;
                    }
                }
                rows.push(row);
            }
        }
        // rank by elimination
        let mut rank = 0usize;
        for col in 0..t {
            let Some(p_row) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, p_row);
            let inv = f.inv(rows[rank][col]).unwrap();
            for x in rows[rank].iter_mut() {
                *x = f.mul(*x, inv);
            }
            for i in 0..rows.len() {
                if i != rank && !rows[i][col].is_zero() {
                    let factor = rows[i][col];
                    for cidx in 0..t {
                        let v = f.mul(factor, rows[rank][cidx]);
                        rows[i][cidx] = f.sub(rows[i][cidx], v);
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        let kernel = 2 * ns - rank;
        count += q.pow(kernel as u32);
        *strata.entry(kernel).or_insert(0) += 1;
        code += 1;
    }
    let mut witnessed = 0i64;
    for (kernel, n) in &strata {
        // heuristic stratum dimension: log_q of the stratum size, rounded
        let dim_cg = ((*n as f64).ln() / (q as f64).ln()).round() as i64;
        witnessed = witnessed.max(dim_cg + *kernel as i64);
    }
    Ok(AbcdCount {
        count,
        witnessed_dim: witnessed,
        ambient_dim: ambient,
    })
}

//! Ordinary induction from maximal tori and the modular rank check: the
//! matrix of induced character values on p-regular classes must have rank
//! equal to the number of those classes, over a prime ell that is 1 modulo
//! every torus exponent and prime to |G|.

use super::group::GroupTable;
use super::CharsError;
use crate::ring::{FieldCtx, Fq};

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn mod_inv(a: u64, m: u64) -> u64 {
    // m prime
    mod_pow(a, m - 2, m)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn partitions_of(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            cur.push(part);
            rec(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Smallest generator of F_ell^*.
fn primitive_root(ell: u64) -> u64 {
    let phi = ell - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    'outer: for g in 2..ell {
        for &f in &factors {
            if mod_pow(g, phi / f, ell) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("ell is prime")
}

/// One torus: the embedded subgroup elements together with their component
/// discrete logs, and the component orders.
struct Torus {
    /// (group element index, per-part discrete logs).
    members: Vec<(usize, Vec<u64>)>,
    orders: Vec<u64>,
}

fn build_torus(
    f: &FieldCtx,
    group: &GroupTable,
    parts: &[u32],
) -> Result<Torus, CharsError> {
    assert_eq!(f.k, 1, "torus construction assumes a prime base field");
    let n: u32 = parts.iter().sum();
    let nn = n as usize;
    let exts: Vec<FieldCtx> = parts
        .iter()
        .map(|&ni| FieldCtx::new(f.p, ni).map_err(|e| CharsError::TooLarge(e.to_string())))
        .collect::<Result<_, _>>()?;
    let orders: Vec<u64> = exts.iter().map(|e| (e.q - 1) as u64).collect();
    // multiplication-by-a matrix in the power basis of each extension
    let embed_block = |ext: &FieldCtx, a: Fq, ni: usize| -> Vec<Vec<Fq>> {
        let mut cols = Vec::with_capacity(ni);
        let x = ext.generator();
        let mut basis = Fq::ONE;
        for _ in 0..ni {
            let prod = ext.mul(a, basis);
            let digits = ext.digits(prod);
            cols.push(digits.iter().map(|&d| f.from_int(d as i64)).collect());
            basis = ext.mul(basis, x);
        }
        cols
    };
    let mut members = Vec::new();
    let total: u64 = orders.iter().product();
    for code in 0..total {
        let mut c = code;
        let mut logs = Vec::with_capacity(parts.len());
        let mut mat = vec![Fq::ZERO; nn * nn];
        let mut offset = 0usize;
        for (pi, &ni) in parts.iter().enumerate() {
            let l = c % orders[pi];
            c /= orders[pi];
            logs.push(l);
            let ext = &exts[pi];
            let a = ext.pow(ext.generator(), l);
            let cols = embed_block(ext, a, ni as usize);
            for (j, col) in cols.iter().enumerate() {
                for (i, &v) in col.iter().enumerate() {
                    mat[(offset + i) * nn + (offset + j)] = v;
                }
            }
            offset += ni as usize;
        }
        members.push((group.index_of(&mat), logs));
    }
    Ok(Torus { members, orders })
}

#[derive(Clone, Debug)]
pub struct SpanningReport {
    pub rank: usize,
    pub p_regular_classes: usize,
    pub ell: u64,
    pub characters: usize,
    pub full: bool,
    /// ell values that were tried without reaching full rank.
    pub retries: Vec<u64>,
}

fn admissible_ells(group_order: u64, exponent_lcm: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut ell = exponent_lcm + 1;
    while out.len() < count {
        if is_prime(ell) && group_order % ell != 0 && (ell - 1) % exponent_lcm == 0 {
            out.push(ell);
        }
        ell += exponent_lcm.max(1);
    }
    out
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Rank over F_ell of the matrix of induced torus characters evaluated on
/// p-regular classes. A full rank certifies rational spanning; short rank
/// retries the next admissible ell a few times before reporting.
pub fn spanning_rank(
    n: u32,
    q: u32,
    ell_choice: Option<u64>,
) -> Result<SpanningReport, CharsError> {
    let f = FieldCtx::new(q, 1).map_err(|e| CharsError::TooLarge(e.to_string()))?;
    let group = GroupTable::gl(&f, n as usize);
    let parts_list = partitions_of(n);
    let tori: Vec<Torus> = parts_list
        .iter()
        .map(|p| build_torus(&f, &group, p))
        .collect::<Result<_, _>>()?;
    let exponent = tori
        .iter()
        .flat_map(|t| t.orders.iter().copied())
        .fold(1u64, lcm);
    let ells = match ell_choice {
        Some(l) => {
            if !is_prime(l) || group.order() as u64 % l == 0 || (l - 1) % exponent != 0 {
                return Err(CharsError::BadModulus(format!(
                    "ell = {l} must be prime, prime to |G| = {}, and 1 mod {exponent}",
                    group.order()
                )));
            }
            vec![l]
        }
        None => admissible_ells(group.order() as u64, exponent, 5),
    };
    let p_reg = group.p_regular_classes();
    let mut retries = Vec::new();
    let mut last = None;
    for ell in ells {
        let report = rank_at_ell(&f, &group, &tori, &p_reg, ell);
        if report.full {
            return Ok(report);
        }
        retries.push(ell);
        last = Some(report);
    }
    let mut report = last.expect("at least one ell tried");
    report.retries = retries;
    Ok(report)
}

fn rank_at_ell(
    f: &FieldCtx,
    group: &GroupTable,
    tori: &[Torus],
    p_reg: &[usize],
    ell: u64,
) -> SpanningReport {
    let g_ord = group.order() as u64;
    let root = primitive_root(ell);
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for torus in tori {
        let t_ord = torus.members.len() as u64;
        let t_inv = mod_inv(t_ord % ell, ell);
        // conjugation counts: per class rep, how often each torus member is hit
        let mut hit: Vec<Vec<u64>> = vec![vec![0; torus.members.len()]; p_reg.len()];
        let member_pos: std::collections::HashMap<usize, usize> = torus
            .members
            .iter()
            .enumerate()
            .map(|(i, (g, _))| (*g, i))
            .collect();
        for (ci, &class) in p_reg.iter().enumerate() {
            let rep = group.class_reps[class];
            for x in 0..group.order() {
                let xi = group.inv(f, x);
                let conj = group.mul(f, group.mul(f, xi, rep), x);
                if let Some(&pos) = member_pos.get(&conj) {
                    hit[ci][pos] += 1;
                }
            }
        }
        // roots of unity per component
        let zetas: Vec<u64> = torus
            .orders
            .iter()
            .map(|&o| mod_pow(root, (ell - 1) / o, ell))
            .collect();
        let char_total: u64 = torus.orders.iter().product();
        for ccode in 0..char_total {
            let mut c = ccode;
            let chi: Vec<u64> = torus
                .orders
                .iter()
                .map(|&o| {
                    let v = c % o;
                    c /= o;
                    v
                })
                .collect();
            let mut row = Vec::with_capacity(p_reg.len());
            for hits in &hit {
                let mut acc = 0u64;
                for (pos, &count) in hits.iter().enumerate() {
                    if count == 0 {
                        continue;
                    }
                    let logs = &torus.members[pos].1;
                    let mut val = 1u64;
                    for ((&z, &cc), (&l, &o)) in zetas
                        .iter()
                        .zip(chi.iter())
                        .zip(logs.iter().zip(torus.orders.iter()))
                    {
                        val = val * mod_pow(z, cc * l % o, ell) % ell;
                    }
                    acc = (acc + count % ell * val) % ell;
                }
                row.push(acc * t_inv % ell);
            }
            rows.push(row);
        }
        let _ = g_ord;
    }
    let characters = rows.len();
    // rank over F_ell
    let cols = p_reg.len();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p_row) = (rank..rows.len()).find(|&r| rows[r][col] % ell != 0) else {
            continue;
        };
        rows.swap(rank, p_row);
        let inv = mod_inv(rows[rank][col], ell);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % ell;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] % ell != 0 {
                let factor = rows[r][col];
                for c in 0..cols {
                    let t = factor * rows[rank][c] % ell;
                    rows[r][c] = (rows[r][c] + ell - t) % ell;
                }
            }
        }
        rank += 1;
    }
    SpanningReport {
        rank,
        p_regular_classes: cols,
        ell,
        characters,
        full: rank == cols,
        retries: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_f2_rank_is_two() {
        let r = spanning_rank(2, 2, None).unwrap();
        assert_eq!(r.p_regular_classes, 2);
        assert_eq!(r.rank, 2);
        assert!(r.full);
        // split torus is trivial (order 1), nonsplit is C_3: 1 + 3 characters
        assert_eq!(r.characters, 4);
    }

    #[test]
    fn gl2_f3_rank_is_full() {
        let r = spanning_rank(2, 3, None).unwrap();
        assert!(r.full, "rank {} of {}", r.rank, r.p_regular_classes);
    }

    #[test]
    fn gl3_f2_exploratory_run() {
        // the selection hypothesis |k_F| >= n+1 fails here; the spanning
        // conclusion itself is still observed
        let r = spanning_rank(3, 2, None).unwrap();
        assert_eq!(r.p_regular_classes, 4);
        assert!(r.full);
    }

    #[test]
    fn rank_independent_of_admissible_ell() {
        // GL_2(F_3): exponent lcm(2, 8) = 8; GL_2(F_2): exponent 3
        for (n, q, ells) in [(2u32, 3u32, [17u64, 41, 73]), (2, 2, [7, 13, 19])] {
            let mut ranks = Vec::new();
            for ell in ells {
                let r = spanning_rank(n, q, Some(ell)).unwrap();
                ranks.push(r.rank);
            }
            assert!(
                ranks.windows(2).all(|w| w[0] == w[1]),
                "n = {n}, q = {q}: {ranks:?}"
            );
        }
    }

    #[test]
    fn bad_moduli_rejected() {
        assert!(matches!(
            spanning_rank(2, 2, Some(5)),
            Err(CharsError::BadModulus(_))
        ));
        assert!(matches!(
            spanning_rank(2, 2, Some(3)),
            Err(CharsError::BadModulus(_))
        ));
    }

    #[test]
    fn induction_is_class_function_and_reciprocity_holds() {
        // <Ind chi, Ind chi>_G computed on classes equals the direct
        // element sum, for every torus character of GL_2(F_2) and GL_2(F_3)
        for q in [2u32, 3] {
            let f = FieldCtx::new(q, 1).unwrap();
            let group = GroupTable::gl(&f, 2);
            let parts_list = partitions_of(2);
            let exponent = parts_list
                .iter()
                .flat_map(|p| p.iter().map(|&ni| (q as u64).pow(ni) - 1))
                .fold(1u64, lcm);
            let ell = admissible_ells(group.order() as u64, exponent, 1)[0];
            let root = primitive_root(ell);
            for parts in &parts_list {
                let torus = build_torus(&f, &group, parts).unwrap();
                let t_ord = torus.members.len() as u64;
                let t_inv = mod_inv(t_ord % ell, ell);
                let zetas: Vec<u64> = torus
                    .orders
                    .iter()
                    .map(|&o| mod_pow(root, (ell - 1) / o, ell))
                    .collect();
                let char_total: u64 = torus.orders.iter().product();
                for ccode in 0..char_total {
                    let mut c = ccode;
                    let chi: Vec<u64> = torus
                        .orders
                        .iter()
                        .map(|&o| {
                            let v = c % o;
                            c /= o;
                            v
                        })
                        .collect();
                    // induced values per element
                    let chi_at = |pos: usize| -> u64 {
                        let logs = &torus.members[pos].1;
                        let mut val = 1u64;
                        for ((&z, &cc), (&l, &o)) in zetas
                            .iter()
                            .zip(chi.iter())
                            .zip(logs.iter().zip(torus.orders.iter()))
                        {
                            val = val * mod_pow(z, cc * l % o, ell) % ell;
                        }
                        val
                    };
                    let member_pos: std::collections::HashMap<usize, usize> = torus
                        .members
                        .iter()
                        .enumerate()
                        .map(|(i, (g, _))| (*g, i))
                        .collect();
                    let ind: Vec<u64> = (0..group.order())
                        .map(|g| {
                            let mut acc = 0u64;
                            for x in 0..group.order() {
                                let xi = group.inv(&f, x);
                                let conj = group.mul(&f, group.mul(&f, xi, g), x);
                                if let Some(&pos) = member_pos.get(&conj) {
                                    acc = (acc + chi_at(pos)) % ell;
                                }
                            }
                            acc * t_inv % ell
                        })
                        .collect();
                    // class function
                    for g in 0..group.order() {
                        let rep = group.class_reps[group.class_of[g]];
                        assert_eq!(ind[g], ind[rep]);
                    }
                    // reciprocity: |G|^{-1} sum_g Ind(g) Ind(g^{-1}) equals
                    // |T|^{-1} sum_t chi(t) Ind(t^{-1})
                    let g_inv_ord = mod_inv(group.order() as u64 % ell, ell);
                    let lhs = (0..group.order()).fold(0u64, |acc, g| {
                        let gi = group.inv(&f, g);
                        (acc + ind[g] * ind[gi]) % ell
                    }) * g_inv_ord
                        % ell;
                    let rhs = torus
                        .members
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (pos, (gidx, _))| {
                            let gi = group.inv(&f, *gidx);
                            (acc + chi_at(pos) * ind[gi]) % ell
                        })
                        * t_inv
                        % ell;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

//! Galois orbits of primitive elements and the greedy selection of torus
//! parameter sequences.

use super::CharsError;
use crate::ring::{FieldCtx, Fq};

fn moebius(n: u64) -> i64 {
    let mut n = n;
    let mut m = 1i64;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            m = -m;
        }
        d += 1;
    }
    if n > 1 {
        m = -m;
    }
    m
}

/// Number of Galois orbits on the nonzero primitive elements of the degree-n
/// extension of F_q: -[n = 1] + (1/n) sum_{d | n} mu(d) q^{n/d}.
pub fn moebius_orbit_count(q: u64, n: u32) -> i64 {
    let mut total = 0i64;
    for d in 1..=n as u64 {
        if n as u64 % d == 0 {
            total += moebius(d) * (q.pow(n / d as u32) as i64);
        }
    }
    let mut out = total / n as i64;
    if n == 1 {
        out -= 1;
    }
    out
}

/// The same count by enumeration: elements of F_{q^n} of degree exactly n
/// over F_q, counted up to x -> x^q. Requires q = p^k and a table entry for
/// F_{p^{k n}}.
pub fn enumerate_orbit_count(p: u32, k: u32, n: u32) -> Result<i64, CharsError> {
    let big = FieldCtx::new(p, k * n).map_err(|e| CharsError::TooLarge(e.to_string()))?;
    let q = (p as u64).pow(k);
    let mut seen = vec![false; big.q as usize];
    let mut orbits = 0i64;
    for raw in 1..big.q {
        let a = Fq(raw as u16);
        if seen[raw as usize] {
            continue;
        }
        // orbit of a under x -> x^q
        let mut orbit = Vec::new();
        let mut x = a;
        loop {
            orbit.push(x);
            seen[x.0 as usize] = true;
            x = big.pow(x, q);
            if x == a {
                break;
            }
        }
        // degree over F_q is the orbit size; primitive means degree n
        if orbit.len() == n as usize {
            orbits += 1;
        }
    }
    Ok(orbits)
}

/// One chosen element per part, with representatives of distinct Galois
/// orbits for equal parts.
#[derive(Clone, Debug)]
pub struct SelectedSequence {
    /// Per part: (part size n_i, encoded element of F_{q^{n_i}}).
    pub elems: Vec<(u32, Fq)>,
}

/// Greedy selection of a sequence for the partition: each entry generates
/// its field over F_q, and entries of equal part size are pairwise
/// non-conjugate under Galois. Returns None exactly when some part size
/// does not carry enough orbits.
pub fn select_sequence(p: u32, k: u32, parts: &[u32]) -> Result<Option<SelectedSequence>, CharsError> {
    let q = (p as u64).pow(k);
    let mut elems = Vec::with_capacity(parts.len());
    let mut used: std::collections::BTreeMap<u32, Vec<Vec<Fq>>> = Default::default();
    for &n in parts {
        let big = FieldCtx::new(p, k * n).map_err(|e| CharsError::TooLarge(e.to_string()))?;
        let taken = used.entry(n).or_default();
        let mut found = None;
        'search: for raw in 1..big.q {
            let a = Fq(raw as u16);
            // degree must be exactly n
            let mut orbit = Vec::new();
            let mut x = a;
            loop {
                orbit.push(x);
                x = big.pow(x, q);
                if x == a {
                    break;
                }
            }
            if orbit.len() != n as usize {
                continue;
            }
            for prev in taken.iter() {
                if prev.contains(&a) {
                    continue 'search;
                }
            }
            found = Some((a, orbit));
            break;
        }
        match found {
            Some((a, orbit)) => {
                taken.push(orbit);
                elems.push((n, a));
            }
            None => return Ok(None),
        }
    }
    Ok(Some(SelectedSequence { elems }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_formula_examples() {
        assert_eq!(moebius_orbit_count(2, 2), 1);
        assert_eq!(moebius_orbit_count(3, 2), 3);
        assert_eq!(moebius_orbit_count(4, 1), 3);
    }

    #[test]
    fn formula_matches_enumeration_small() {
        for (p, k, n) in [(2u32, 1u32, 1u32), (2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2), (5, 1, 2)] {
            let q = (p as u64).pow(k);
            assert_eq!(
                moebius_orbit_count(q, n),
                enumerate_orbit_count(p, k, n).unwrap(),
                "q = {q}, n = {n}"
            );
        }
    }

    #[test]
    fn selection_examples() {
        // q = 5 supports three distinct scalars
        assert!(select_sequence(5, 1, &[1, 1, 1]).unwrap().is_some());
        // q = 2 has a single nonzero scalar
        assert!(select_sequence(2, 1, &[1, 1, 1]).unwrap().is_none());
        // one primitive orbit in F_4 plus the scalar
        let s = select_sequence(2, 1, &[2, 1]).unwrap().unwrap();
        assert_eq!(s.elems.len(), 2);
        // but two orbits of degree 2 do not exist over F_2
        assert!(select_sequence(2, 1, &[2, 2]).unwrap().is_none());
    }

    #[test]
    fn guarantee_when_q_large_enough() {
        // |k_F| >= n + 1 guarantees a sequence for every partition of n <= 3
        for (p, n_parts) in [(5u32, vec![vec![3u32], vec![2, 1], vec![1, 1, 1]])] {
            for parts in n_parts {
                assert!(
                    select_sequence(p, 1, &parts).unwrap().is_some(),
                    "q = {p}, parts = {parts:?}"
                );
            }
        }
    }
}

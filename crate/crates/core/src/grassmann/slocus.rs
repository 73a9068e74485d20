//! The derivation loci on Gr_{<= mu*}: given a pole-free matrix part N_0 and
//! a scalar alpha(u), the derivation N = N_0 + alpha(u) u d/du acts on V_h;
//! the locus at step i is cut out by the linear functionals
//! (N + c(u) u^i d/du) w - const * w ranged over the low-weight w.

use super::coweight::Coweight;
use super::lattice::Lattice;
use super::wedge::WedgeVector;
use super::GrassmannError;
use crate::ring::{FieldCtx, Fq, SeriesMatrix, TruncatedSeries};

/// N_0 + alpha(u) * u d/du acting on V_h. `n0` must have every entry of
/// valuation >= 1; only the coefficients below u^h matter.
#[derive(Clone, Debug)]
pub struct DerivationData {
    pub n0: SeriesMatrix,
    pub scalar: TruncatedSeries,
}

impl DerivationData {
    pub fn pure_scalar(d: usize, h: usize, scalar: TruncatedSeries) -> Self {
        DerivationData {
            n0: SeriesMatrix::zero(d, h as i64),
            scalar,
        }
    }

    /// Matrix of the action on the label basis of V_h (columns act on
    /// y_{jd+i}); entry rows are indexed the same way.
    pub fn action_matrix(
        &self,
        f: &FieldCtx,
        h: usize,
    ) -> Result<Vec<Vec<Fq>>, GrassmannError> {
        let d = self.n0.d;
        let n = d * h;
        let mut act = vec![vec![Fq::ZERO; n]; n];
        for j in 0..h {
            for i in 0..d {
                let src = j * d + i;
                // N_0 part: u^j e_i -> u^j * sum_r n0[r][i] e_r
                for r in 0..d {
                    let entry = self.n0.at(r, i);
                    if let Some(v) = entry.valuation() {
                        if v < 1 {
                            return Err(GrassmannError::RankMismatch(
                                "derivation matrix part must vanish at u = 0".into(),
                            ));
                        }
                    }
                    for m in 1..h.saturating_sub(j) {
                        let c = entry.coeff(m as i64).unwrap_or(Fq::ZERO);
                        if !c.is_zero() {
                            act[(j + m) * d + r][src] = f.add(act[(j + m) * d + r][src], c);
                        }
                    }
                }
                // scalar part: alpha(u) * u d/du on u^j is j * alpha(u) u^j
                if j > 0 {
                    let jc = f.from_int(j as i64);
                    for m in 0..h - j {
                        let c = self.scalar.coeff(m).unwrap_or(Fq::ZERO);
                        let c = f.mul(c, jc);
                        if !c.is_zero() {
                            act[(j + m) * d + i][src] = f.add(act[(j + m) * d + i][src], c);
                        }
                    }
                }
            }
        }
        Ok(act)
    }
}

/// Apply the derivation to a wedge by the Leibniz rule.
pub fn derivation_act_wedge(
    f: &FieldCtx,
    d: DerivationData,
    w: &WedgeVector,
    h: usize,
) -> Result<WedgeVector, GrassmannError> {
    let act = d.action_matrix(f, h)?;
    Ok(w.apply_derivation(f, &act))
}

/// Flags the regime where the flag/Springer identification is not expected:
/// some nu <= mu has sum_l sum_{j=nu*_l}^{h-1} j >= p.
pub fn s_locus_weight_flag(mu: &Coweight, h: i64, p: u32) -> bool {
    let d = mu.len();
    for nu in Coweight::enumerate_dominant(d, h, mu.sum()) {
        if !nu.dominance_leq(mu) {
            continue;
        }
        let Ok(nu_star) = nu.dual(h) else { continue };
        let s: i64 = nu_star
            .entries()
            .iter()
            .map(|&l| (l..h).sum::<i64>())
            .sum();
        if s >= p as i64 {
            return true;
        }
    }
    false
}

/// Weight bound below which functionals are imposed: sum_l sum_{j=1}^{mu*_l - 1} j.
fn functional_weight_bound(mu_star: &Coweight) -> i64 {
    mu_star
        .entries()
        .iter()
        .map(|&l| (1..l).sum::<i64>())
        .sum()
}

/// Membership of (L, D) in the step-i locus for Hodge bound mu. The scalar
/// carried by `d` is c(u); the step twists it to c(u) u^{i-1}, which kills
/// the constant term exactly when i > 1.
pub fn s_locus_check(
    f: &FieldCtx,
    lattice: &Lattice,
    d: &DerivationData,
    i: usize,
    mu: &Coweight,
) -> Result<bool, GrassmannError> {
    assert!(i >= 1);
    let h = lattice.h;
    let mu_star = mu.dual(h as i64)?;
    let eff = DerivationData {
        n0: d.n0.clone(),
        scalar: d.scalar.mul_monomial(i - 1).truncate(d.scalar.prec()),
    };
    let act = eff.action_matrix(f, h)?;
    let v = lattice.pluecker(f)?;
    let bound = functional_weight_bound(&mu_star);
    let const_term = if i == 1 {
        f.mul(
            d.scalar.coeff(0).unwrap_or(Fq::ZERO),
            f.from_int(bound),
        )
    } else {
        Fq::ZERO
    };
    let r: i64 = mu_star.sum();
    let n = lattice.d * h;
    // iterate low-weight basis wedges of degree r
    let mut tuple: Vec<u8> = (0..r as usize).map(|x| x as u8).collect();
    loop {
        if WedgeVector::gm_weight(&tuple, lattice.d) < bound {
            let w = WedgeVector::basis(n, &tuple);
            let mut fw = w.apply_derivation(f, &act);
            if !const_term.is_zero() {
                fw = fw.sub(f, &w.scale(f, const_term));
            }
            if !fw.pair_det(f, &v).is_zero() {
                return Ok(false);
            }
        }
        // next strictly increasing tuple
        let k = tuple.len();
        let mut idx = k;
        loop {
            if idx == 0 {
                return Ok(true);
            }
            idx -= 1;
            if (tuple[idx] as usize) < n - (k - idx) {
                tuple[idx] += 1;
                for t in idx + 1..k {
                    tuple[t] = tuple[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The full-basis variant of [`s_locus_check`]: the same functionals imposed
/// for every degree-r basis wedge, not only the low-weight ones. Equivalent
/// by the eigenvector/functional duality; kept as a cross-check.
pub fn s_locus_check_full(
    f: &FieldCtx,
    lattice: &Lattice,
    d: &DerivationData,
    i: usize,
    mu: &Coweight,
) -> Result<bool, GrassmannError> {
    assert!(i >= 1);
    let h = lattice.h;
    let mu_star = mu.dual(h as i64)?;
    let eff = DerivationData {
        n0: d.n0.clone(),
        scalar: d.scalar.mul_monomial(i - 1).truncate(d.scalar.prec()),
    };
    let act = eff.action_matrix(f, h)?;
    let v = lattice.pluecker(f)?;
    let bound = functional_weight_bound(&mu_star);
    let const_term = if i == 1 {
        f.mul(d.scalar.coeff(0).unwrap_or(Fq::ZERO), f.from_int(bound))
    } else {
        Fq::ZERO
    };
    let r: i64 = mu_star.sum();
    let n = lattice.d * h;
    let mut tuple: Vec<u8> = (0..r as usize).map(|x| x as u8).collect();
    loop {
        let w = WedgeVector::basis(n, &tuple);
        let mut fw = w.apply_derivation(f, &act);
        if !const_term.is_zero() {
            fw = fw.sub(f, &w.scale(f, const_term));
        }
        if !fw.pair_det(f, &v).is_zero() {
            return Ok(false);
        }
        let k = tuple.len();
        let mut idx = k;
        loop {
            if idx == 0 {
                return Ok(true);
            }
            idx -= 1;
            if (tuple[idx] as usize) < n - (k - idx) {
                tuple[idx] += 1;
                for t in idx + 1..k {
                    tuple[t] = tuple[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The single explicit section cutting the d=3, h=2, mu=(2,1,0) locus, paired
/// against the Pluecker vector of L. The sign convention on `nmat` is the
/// chart-side one: the derivation matrix part is N_0 = -u * nmat mod u^2
/// (the coordinate Y rather than the monodromy -h^{-1} Y h). With that
/// reading the value vanishes iff `s_locus_check` passes; `c0` is c(0).
pub fn s_locus_equation_d3(
    f: &FieldCtx,
    lattice: &Lattice,
    nmat: &[Fq; 9],
    i: usize,
    c0: Fq,
) -> Result<Fq, GrassmannError> {
    assert_eq!((lattice.d, lattice.h), (3, 2));
    let v = lattice.pluecker(f)?;
    let term = |labels: [u8; 3], c: Fq| -> Fq {
        f.mul(c, WedgeVector::basis(6, &labels).pair_det(f, &v))
    };
    let n = |r: usize, c: usize| nmat[r * 3 + c];
    let mut acc = Fq::ZERO;
    acc = f.add(acc, term([1, 2, 3], n(0, 0)));
    acc = f.add(acc, term([1, 2, 4], n(1, 0)));
    acc = f.add(acc, term([1, 2, 5], n(2, 0)));
    acc = f.sub(acc, term([0, 2, 3], n(0, 1)));
    acc = f.sub(acc, term([0, 2, 4], n(1, 1)));
    acc = f.sub(acc, term([0, 2, 5], n(2, 1)));
    acc = f.add(acc, term([0, 1, 3], n(0, 2)));
    acc = f.add(acc, term([0, 1, 4], n(1, 2)));
    acc = f.add(acc, term([0, 1, 5], n(2, 2)));
    if i == 1 {
        acc = f.add(acc, term([0, 1, 2], c0));
    }
    Ok(acc)
}

/// Condition (3): the derivation stabilises the lattice inside V_h.
pub fn stabilization_check(
    f: &FieldCtx,
    lattice: &Lattice,
    d: &DerivationData,
) -> Result<bool, GrassmannError> {
    let act = d.action_matrix(f, lattice.h)?;
    for row in lattice.rows() {
        let mut img = vec![Fq::ZERO; row.len()];
        for (src, &c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (tgt, imgc) in img.iter_mut().enumerate() {
                *imgc = f.add(*imgc, f.mul(c, act[tgt][src]));
            }
        }
        if !lattice.contains(f, &img) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Condition (2): the Pluecker line is an eigenvector with the weight
/// eigenvalue alpha(0) * sum_l sum_{j=nu*_l}^{h-1} j.
pub fn eigenvector_check(
    f: &FieldCtx,
    lattice: &Lattice,
    d: &DerivationData,
    nu: &Coweight,
    h: usize,
) -> Result<bool, GrassmannError> {
    let nu_star = nu.dual(h as i64)?;
    let eigen: i64 = nu_star
        .entries()
        .iter()
        .map(|&l| (l..h as i64).sum::<i64>())
        .sum();
    let scalar = f.mul(d.scalar.coeff(0).unwrap_or(Fq::ZERO), f.from_int(eigen));
    let v = lattice.pluecker(f)?;
    let act = d.action_matrix(f, h)?;
    let dv = v.apply_derivation(f, &act);
    Ok(dv == v.scale(f, scalar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::lattice::enumerate_ustable_lattices;
    use crate::ring::ValuatedSeries;

    fn f5() -> FieldCtx {
        FieldCtx::new(5, 1).unwrap()
    }

    fn span(f: &FieldCtx, labels: &[usize]) -> Lattice {
        let gens: Vec<Vec<Fq>> = labels
            .iter()
            .map(|&l| {
                let mut v = vec![Fq::ZERO; 6];
                v[l] = Fq::ONE;
                v
            })
            .collect();
        Lattice::from_generators(f, 3, 2, &gens)
    }

    fn scalar_c(f: &FieldCtx, c0: i64) -> DerivationData {
        DerivationData::pure_scalar(3, 2, TruncatedSeries::monomial(f.from_int(c0), 0, 8))
    }

    #[test]
    fn s_locus_examples_d3() {
        let f = f5();
        let mu = Coweight::from_slice(&[2, 1, 0]);
        let d = scalar_c(&f, 2);
        // flag point passes at i = 1
        assert!(s_locus_check(&f, &span(&f, &[2, 4, 5]), &d, 1, &mu).unwrap());
        // the central point fails at i = 1 but passes at i = 2
        assert!(!s_locus_check(&f, &span(&f, &[3, 4, 5]), &d, 1, &mu).unwrap());
        assert!(s_locus_check(&f, &span(&f, &[3, 4, 5]), &d, 2, &mu).unwrap());
    }

    #[test]
    fn explicit_section_examples() {
        let f = f5();
        let zero_n = [Fq::ZERO; 9];
        let c0 = f.from_int(3);
        // span{y0,y3,y4}: all nine n-terms vanish and the constant pairs to 0
        let v = s_locus_equation_d3(&f, &span(&f, &[0, 3, 4]), &zero_n, 1, c0).unwrap();
        assert!(v.is_zero());
        // central point: only the constant term survives
        let v = s_locus_equation_d3(&f, &span(&f, &[3, 4, 5]), &zero_n, 1, c0).unwrap();
        assert!(!v.is_zero());
        // i = 2 drops the constant
        let mut rng = crate::util::Rng::new(23);
        let mut nm = [Fq::ZERO; 9];
        for e in nm.iter_mut() {
            *e = f.from_int(rng.below(5) as i64);
        }
        let v = s_locus_equation_d3(&f, &span(&f, &[3, 4, 5]), &nm, 2, c0).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn section_vanishes_iff_locus_check_passes() {
        let f = f5();
        let mu = Coweight::from_slice(&[2, 1, 0]);
        let mut rng = crate::util::Rng::new(7);
        let lattices = enumerate_ustable_lattices(&f, 3, 2, 3);
        for _ in 0..6 {
            let mut nm = [Fq::ZERO; 9];
            for e in nm.iter_mut() {
                *e = f.from_int(rng.below(5) as i64);
            }
            let c0 = f.from_int(1 + rng.below(4) as i64);
            // section convention: matrix part is -u * nm
            let n0 = SeriesMatrix::from_fn(3, |r, c| {
                ValuatedSeries::monomial(f.neg(nm[r * 3 + c]), 1, 6)
            });
            for i in [1usize, 2] {
                let d = DerivationData {
                    n0: n0.clone(),
                    scalar: TruncatedSeries::monomial(c0, 0, 8),
                };
                for lat in lattices.iter().step_by(7) {
                    let a = s_locus_check(&f, lat, &d, i, &mu).unwrap();
                    let b = s_locus_equation_d3(&f, lat, &nm, i, c0).unwrap().is_zero();
                    assert_eq!(a, b, "i={i} lattice {lat:?}");
                }
            }
        }
    }

    #[test]
    fn derivation_wedge_examples() {
        let f = f5();
        let d = scalar_c(&f, 1);
        let w = WedgeVector::basis(6, &[3, 4, 5]);
        let dw = derivation_act_wedge(&f, d.clone(), &w, 2).unwrap();
        assert_eq!(dw, w.scale(&f, f.from_int(3)));
        let w0 = WedgeVector::basis(6, &[0, 1, 2]);
        assert!(derivation_act_wedge(&f, d, &w0, 2).unwrap().is_zero());
        // N0 = u E_21 sends y0 = e1 to y4 = u e2
        let mut n0 = SeriesMatrix::zero(3, 6);
        n0.set(1, 0, ValuatedSeries::monomial(Fq::ONE, 1, 6));
        let dd = DerivationData {
            n0,
            scalar: TruncatedSeries::zero(8),
        };
        let y0 = WedgeVector::basis(6, &[0]);
        let img = derivation_act_wedge(&f, dd, &y0, 2).unwrap();
        assert_eq!(img, WedgeVector::basis(6, &[4]));
    }

    #[test]
    fn stabilization_and_eigenvector_examples() {
        let f = f5();
        let d = scalar_c(&f, 2);
        // monomial lattices are graded: both conditions hold
        let fl = span(&f, &[0, 3, 4]);
        assert!(stabilization_check(&f, &fl, &d).unwrap());
        assert!(eigenvector_check(&f, &fl, &d, &Coweight::from_slice(&[2, 1, 0]), 2).unwrap());
        // N0 = u E_21 stabilises span{y0, y3, y4}
        let mut n0 = SeriesMatrix::zero(3, 6);
        n0.set(1, 0, ValuatedSeries::monomial(Fq::ONE, 1, 6));
        let dd = DerivationData {
            n0,
            scalar: TruncatedSeries::zero(8),
        };
        assert!(stabilization_check(&f, &fl, &dd).unwrap());
    }

    #[test]
    fn eigenvector_implies_stabilization_sampled() {
        let f = f5();
        let mut rng = crate::util::Rng::new(41);
        let lattices = enumerate_ustable_lattices(&f, 3, 2, 3);
        let mut hits = 0;
        let mut tried = 0;
        while hits < 500 && tried < 200_000 {
            tried += 1;
            let lat = &lattices[rng.below(lattices.len() as u64) as usize];
            let mut n0 = SeriesMatrix::zero(3, 6);
            for r in 0..3 {
                for c in 0..3 {
                    n0.set(
                        r,
                        c,
                        ValuatedSeries::monomial(f.from_int(rng.below(5) as i64), 1, 6),
                    );
                }
            }
            let d = DerivationData {
                n0,
                scalar: TruncatedSeries::monomial(f.from_int(rng.below(5) as i64), 0, 8),
            };
            for nu in [
                Coweight::from_slice(&[2, 1, 0]),
                Coweight::from_slice(&[1, 1, 1]),
            ] {
                if eigenvector_check(&f, lat, &d, &nu, 2).unwrap() {
                    hits += 1;
                    assert!(
                        stabilization_check(&f, lat, &d).unwrap(),
                        "eigenvector without stabilization at {lat:?}"
                    );
                }
            }
        }
        assert!(hits >= 500, "only {hits} eigenvector instances found");
    }

    #[test]
    fn filtered_and_full_basis_checks_agree() {
        // the low-weight functionals already cut the locus: imposing the
        // full basis changes nothing
        let f = f5();
        let mu = Coweight::from_slice(&[2, 1, 0]);
        let mut rng = crate::util::Rng::new(3);
        let lattices = enumerate_ustable_lattices(&f, 3, 2, 3);
        for trial in 0..4 {
            let n0 = SeriesMatrix::from_fn(3, |_, _| {
                ValuatedSeries::monomial(f.from_int(rng.below(5) as i64), 1, 6)
            });
            let d = DerivationData {
                n0,
                scalar: TruncatedSeries::monomial(f.from_int(1 + rng.below(4) as i64), 0, 8),
            };
            for (idx, lat) in lattices.iter().enumerate() {
                if (idx + trial) % 11 != 0 {
                    continue;
                }
                for i in [1usize, 2] {
                    assert_eq!(
                        s_locus_check(&f, lat, &d, i, &mu).unwrap(),
                        s_locus_check_full(&f, lat, &d, i, &mu).unwrap(),
                        "i = {i}, lattice {lat:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn weight_flag_regimes() {
        // d=3, h=2, mu=(2,1,0): max weight sum is 3 < 5, no flag at p = 5
        let mu = Coweight::from_slice(&[2, 1, 0]);
        assert!(!s_locus_weight_flag(&mu, 2, 5));
        assert!(s_locus_weight_flag(&mu, 2, 3));
    }
}

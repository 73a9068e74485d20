//! Explicit generator families for the top components of one convolution
//! step, and pole-cone membership via elementary divisors of the cleared
//! matrix.

use super::BkError;
use crate::grassmann::Coweight;
use crate::ring::{ArithContext, Fq, SeriesMatrix, ValuatedSeries};

/// One entry of a family template.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MvEntry {
    Zero,
    One,
    /// A free parameter over F_q, sitting on u^{-1}.
    PoleParam(usize),
}

/// A parametrized family of unipotent matrices with simple poles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvFamily {
    pub params: usize,
    pub template: [[MvEntry; 3]; 3],
}

impl MvFamily {
    /// Instantiate at given parameter values.
    pub fn instantiate(&self, vals: &[Fq], prec: usize) -> SeriesMatrix {
        assert_eq!(vals.len(), self.params);
        SeriesMatrix::from_fn(3, |i, j| match self.template[i][j] {
            MvEntry::Zero => ValuatedSeries::zero(prec as i64),
            MvEntry::One => ValuatedSeries::from_const(Fq::ONE, prec),
            MvEntry::PoleParam(k) => ValuatedSeries::monomial(vals[k], -1, prec),
        })
    }
}

fn identity_template() -> [[MvEntry; 3]; 3] {
    let mut t = [[MvEntry::Zero; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        row[i] = MvEntry::One;
    }
    t
}

/// Membership of u^delta * M in the closed (2,1,0) cone: the cleared matrix
/// u^{(h,h,h) - delta} M must have elementary divisors below (2,1,0).
pub fn mv_membership(
    m: &SeriesMatrix,
    delta: &Coweight,
    ctx: &ArithContext,
) -> Result<bool, BkError> {
    let f = &ctx.field;
    if let Some(v) = m.min_valuation() {
        if v < -1 {
            return Err(BkError::UnsupportedDelta(format!(
                "entries must have simple poles at worst, found valuation {v}"
            )));
        }
    }
    let h = ctx.h as i64;
    let cleared = SeriesMatrix::from_fn(3, |i, j| m.at(i, j).shift(h - delta.entries()[i]));
    if !cleared.is_integral() {
        return Ok(false);
    }
    let div = cleared.elementary_divisors(f)?;
    Ok(div.dominance_leq(&Coweight::from_slice(&[2, 1, 0])))
}

/// Generator families per relative coweight delta (entries a permutation of
/// (2,1,0) or the central (1,1,1)). For a permutation the single component
/// carries a pole at (a, b) exactly when delta_a < delta_b (the entries not
/// absorbed by the right translation); the central case splits into the two
/// components. Every emitted family is re-verified member-by-member over
/// F_2 and F_3 before being returned.
pub fn mv_generator_families(delta: &Coweight) -> Result<Vec<MvFamily>, BkError> {
    if delta.len() != 3 {
        return Err(BkError::UnsupportedDelta("need d = 3".into()));
    }
    let sorted = delta.dominant_sorted();
    let central = sorted == Coweight::from_slice(&[1, 1, 1]);
    let perm = sorted == Coweight::from_slice(&[2, 1, 0]);
    if !central && !perm {
        return Err(BkError::UnsupportedDelta(format!(
            "{:?} is outside the (2,1,0) cone",
            delta.entries()
        )));
    }
    let fams = if central {
        // two components: poles along the first row, or along the last column
        let mut a = identity_template();
        a[0][1] = MvEntry::PoleParam(0);
        a[0][2] = MvEntry::PoleParam(1);
        let mut b = identity_template();
        b[0][2] = MvEntry::PoleParam(0);
        b[1][2] = MvEntry::PoleParam(1);
        vec![
            MvFamily { params: 2, template: a },
            MvFamily { params: 2, template: b },
        ]
    } else {
        let mut template = identity_template();
        let mut params = 0;
        for a in 0..3 {
            for b in a + 1..3 {
                if delta.entries()[a] < delta.entries()[b] {
                    template[a][b] = MvEntry::PoleParam(params);
                    params += 1;
                }
            }
        }
        vec![MvFamily { params, template }]
    };
    for fam in &fams {
        for p in [2u32, 3] {
            let ctx = ArithContext::standard(p, 1, 1, 1).unwrap();
            let total = (p as u64).pow(fam.params as u32);
            for code in 0..total {
                let mut c = code;
                let vals: Vec<Fq> = (0..fam.params)
                    .map(|_| {
                        let v = ctx.fq((c % p as u64) as i64);
                        c /= p as u64;
                        v
                    })
                    .collect();
                let m = fam.instantiate(&vals, ctx.prec);
                if !mv_membership(&m, delta, &ctx)? {
                    return Err(BkError::UnsupportedDelta(format!(
                        "family verification failed for {:?}",
                        delta.entries()
                    )));
                }
            }
        }
    }
    Ok(fams)
}

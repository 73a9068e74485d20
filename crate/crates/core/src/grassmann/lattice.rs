//! u-stable subspaces of V_h = (F_q[u]/u^h)^d, stored as reduced row echelon
//! bases over F_q so equality is literal. The coordinate labels are
//! y_{j*d + i} = u^j e_{i+1}; the loop-rotation weight of y_{j*d+i} is j.

use super::coweight::Coweight;
use super::wedge::WedgeVector;
use super::GrassmannError;
use crate::ring::{FieldCtx, Fq, SeriesMatrix, TruncatedSeries, ValuatedSeries};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    pub d: usize,
    pub h: usize,
    /// RREF rows, each of length d*h.
    rows: Vec<Vec<Fq>>,
}

/// In-place reduced row echelon form; returns the rank.
fn rref(f: &FieldCtx, rows: &mut Vec<Vec<Fq>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = f.inv(rows[rank][col]).unwrap();
        for x in rows[rank].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col];
                for c in 0..ncols {
                    let t = f.mul(factor, rows[rank][c]);
                    rows[r][c] = f.sub(rows[r][c], t);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rank
}

/// Multiply a V_h coordinate vector by u.
pub fn u_shift(v: &[Fq], d: usize, h: usize) -> Vec<Fq> {
    let mut out = vec![Fq::ZERO; d * h];
    for j in 0..h.saturating_sub(1) {
        for i in 0..d {
            out[(j + 1) * d + i] = v[j * d + i];
        }
    }
    out
}

impl Lattice {
    /// Span of the given vectors closed under multiplication by u.
    pub fn from_generators(f: &FieldCtx, d: usize, h: usize, gens: &[Vec<Fq>]) -> Lattice {
        let mut rows = Vec::new();
        for g in gens {
            assert_eq!(g.len(), d * h);
            let mut v = g.clone();
            for _ in 0..h {
                if v.iter().all(|c| c.is_zero()) {
                    break;
                }
                rows.push(v.clone());
                v = u_shift(&v, d, h);
            }
        }
        rref(f, &mut rows);
        Lattice { d, h, rows }
    }

    /// Image in V_h of the column span of an integral series matrix.
    pub fn from_series_matrix(
        f: &FieldCtx,
        m: &SeriesMatrix,
        h: usize,
    ) -> Result<Lattice, GrassmannError> {
        let d = m.d;
        if !m.is_integral() {
            return Err(GrassmannError::RankMismatch(
                "matrix with negative valuation does not define a lattice in V_h".into(),
            ));
        }
        let mut gens = Vec::with_capacity(d);
        for col in 0..d {
            let mut v = vec![Fq::ZERO; d * h];
            for row in 0..d {
                for j in 0..h {
                    let c = m
                        .at(row, col)
                        .coeff(j as i64)
                        .ok_or_else(|| GrassmannError::Ring(crate::ring::RingError::PrecisionExhausted(
                            format!("entry ({row},{col}) unknown at u^{j}"),
                        )))?;
                    v[j * d + row] = c;
                }
            }
            gens.push(v);
        }
        Ok(Lattice::from_generators(f, d, h, &gens))
    }

    pub fn rows(&self) -> &[Vec<Fq>] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn colength(&self) -> usize {
        self.d * self.h - self.dim()
    }

    pub fn is_u_stable(&self, f: &FieldCtx) -> bool {
        self.rows
            .iter()
            .all(|r| self.contains(f, &u_shift(r, self.d, self.h)))
    }

    pub fn contains(&self, f: &FieldCtx, v: &[Fq]) -> bool {
        let mut v = v.to_vec();
        for row in &self.rows {
            let pivot = row.iter().position(|c| !c.is_zero()).unwrap();
            if !v[pivot].is_zero() {
                let factor = v[pivot];
                for c in 0..v.len() {
                    v[c] = f.sub(v[c], f.mul(factor, row[c]));
                }
            }
        }
        v.iter().all(|c| c.is_zero())
    }

    /// A d x d series basis matrix of the preimage of this lattice in
    /// F_q[[u]]^d (column span). Entries are polynomials of degree <= h.
    pub fn basis_matrix(&self, f: &FieldCtx, prec: usize) -> SeriesMatrix {
        let d = self.d;
        let h = self.h;
        let n = 3 * h + 3; // internal truncation for the column reduction
        // columns as polynomial vectors mod u^n
        let mut cols: Vec<Vec<Vec<Fq>>> = Vec::new();
        for row in &self.rows {
            let mut col = vec![vec![Fq::ZERO; n]; d];
            for j in 0..h {
                for i in 0..d {
                    col[i][j] = row[j * d + i];
                }
            }
            cols.push(col);
        }
        for i in 0..d {
            let mut col = vec![vec![Fq::ZERO; n]; d];
            col[i][h] = Fq::ONE;
            cols.push(col);
        }
        let val = |c: &Vec<Vec<Fq>>, row: usize| -> Option<usize> {
            c[row].iter().position(|x| !x.is_zero())
        };
        let mut basis: Vec<Vec<Vec<Fq>>> = Vec::with_capacity(d);
        for row in 0..d {
            // pivot: minimal valuation at this row among remaining columns
            let mut best: Option<(usize, usize)> = None;
            for (idx, c) in cols.iter().enumerate() {
                if let Some(v) = val(c, row) {
                    if best.map_or(true, |(_, bv)| v < bv) {
                        best = Some((idx, v));
                    }
                }
            }
            let (pidx, pv) = best.expect("column space contains u^h * standard lattice");
            let pivot = cols.swap_remove(pidx);
            let plead = f.inv(pivot[row][pv]).unwrap();
            for c in cols.iter_mut() {
                let Some(v) = val(c, row) else { continue };
                // exact division: quotient of c[row] by pivot[row]
                let mut quot = vec![Fq::ZERO; n];
                let mut rem = c[row].clone();
                for k in 0..n - pv {
                    let lead = rem[k + pv];
                    if lead.is_zero() {
                        continue;
                    }
                    let qk = f.mul(lead, plead);
                    quot[k] = qk;
                    for (m, &pc) in pivot[row].iter().enumerate() {
                        if m + k < n {
                            let t = f.mul(qk, pc);
                            rem[m + k] = f.sub(rem[m + k], t);
                        }
                    }
                }
                let _ = v;
                for i in 0..d {
                    // c[i] -= quot * pivot[i]
                    let mut prod = vec![Fq::ZERO; n];
                    for (a, &qa) in quot.iter().enumerate() {
                        if qa.is_zero() {
                            continue;
                        }
                        for (b, &pb) in pivot[i].iter().enumerate() {
                            if a + b < n {
                                prod[a + b] = f.add(prod[a + b], f.mul(qa, pb));
                            }
                        }
                    }
                    for m in 0..n {
                        c[i][m] = f.sub(c[i][m], prod[m]);
                    }
                }
            }
            basis.push(pivot);
        }
        SeriesMatrix::from_fn(d, |i, j| {
            // keep only degrees <= h: higher terms are u^h-lattice noise
            let mut ts = TruncatedSeries::zero(prec);
            for m in 0..=h.min(prec.saturating_sub(1)) {
                ts.coeffs[m] = basis[j][i][m];
            }
            ValuatedSeries::from_truncated(ts, 0)
        })
    }

    /// Elementary divisor type of the lattice (colength must equal the sum).
    pub fn divisor_type(&self, f: &FieldCtx) -> Result<Coweight, GrassmannError> {
        let m = self.basis_matrix(f, 3 * self.h + 4);
        Ok(m.elementary_divisors(f)?)
    }

    /// Schubert membership: elementary divisors below eta in dominance.
    pub fn schubert_member(&self, f: &FieldCtx, eta: &Coweight) -> Result<bool, GrassmannError> {
        Ok(self.divisor_type(f)?.dominance_leq(eta))
    }

    /// The Pluecker vector: wedge of the echelon basis, scaled to leading
    /// coordinate 1. Basis-choice independent by construction.
    pub fn pluecker(&self, f: &FieldCtx) -> Result<WedgeVector, GrassmannError> {
        if self.rows.is_empty() {
            return Err(GrassmannError::RankMismatch("zero lattice has no line".into()));
        }
        let mut w = WedgeVector::from_vector(self.d * self.h, &self.rows[0]);
        for row in &self.rows[1..] {
            w = w.wedge_vector(f, row);
        }
        if w.is_zero() {
            return Err(GrassmannError::RankMismatch(
                "basis rows were dependent".into(),
            ));
        }
        Ok(w.normalized(f))
    }

    /// Graded pieces D_k = image of (L cap u^k V + u^{k+1} V)/u^{k+1} in F^d.
    fn graded_pieces(&self, f: &FieldCtx) -> Vec<Vec<Vec<Fq>>> {
        let (d, h) = (self.d, self.h);
        let mut out = Vec::with_capacity(h);
        for k in 0..h {
            // vectors of L supported on labels >= k*d, projected to level k
            let mut sub = Vec::new();
            // solve for combinations of rows vanishing below k*d via rref on
            // the truncated prefix
            let mut aug: Vec<Vec<Fq>> = self
                .rows
                .iter()
                .map(|r| {
                    let mut v = r[..k * d].to_vec();
                    v.extend_from_slice(&r[k * d..(k + 1) * d]);
                    v
                })
                .collect();
            // rref over the prefix columns only; rows with zero prefix give
            // elements of L cap u^k V
            let prefix = k * d;
            let mut rank = 0;
            for col in 0..prefix {
                let Some(p) = (rank..aug.len()).find(|&r| !aug[r][col].is_zero()) else {
                    continue;
                };
                aug.swap(rank, p);
                let inv = f.inv(aug[rank][col]).unwrap();
                for x in aug[rank].iter_mut() {
                    *x = f.mul(*x, inv);
                }
                for r in 0..aug.len() {
                    if r != rank && !aug[r][col].is_zero() {
                        let factor = aug[r][col];
                        for c in 0..aug[r].len() {
                            let t = f.mul(factor, aug[rank][c]);
                            aug[r][c] = f.sub(aug[r][c], t);
                        }
                    }
                }
                rank += 1;
            }
            for row in &aug[rank.min(aug.len())..] {
                sub.push(row[prefix..].to_vec());
            }
            let mut sub2 = sub.clone();
            rref(f, &mut sub2);
            out.push(sub2);
        }
        out
    }

    /// Whether L is the twisted embedding of a constant flag of type nu:
    /// L = sum_j Fil^j u^{h-j} for a decreasing flag Fil with graded type nu.
    pub fn flag_member(&self, f: &FieldCtx, nu: &Coweight, h: usize) -> bool {
        assert_eq!(h, self.h);
        let d = self.d;
        let pieces = self.graded_pieces(f);
        // rebuild the saturated monomial-shape lattice from the pieces
        let mut gens = Vec::new();
        for (k, piece) in pieces.iter().enumerate() {
            for v in piece {
                let mut vec = vec![Fq::ZERO; d * h];
                vec[k * d..(k + 1) * d].copy_from_slice(v);
                gens.push(vec);
            }
        }
        let rebuilt = Lattice::from_generators(f, d, h, &gens);
        if &rebuilt != self {
            return false;
        }
        // graded type: multiplicity of j in nu is dim D_{h-j} - dim D_{h-j-1}
        let dim_d = |k: i64| -> i64 {
            if k < 0 {
                0
            } else if k >= h as i64 {
                d as i64
            } else {
                pieces[k as usize].len() as i64
            }
        };
        let mut type_entries = Vec::new();
        for j in (0..=h as i64).rev() {
            let mult = dim_d(h as i64 - j) - dim_d(h as i64 - j - 1);
            for _ in 0..mult {
                type_entries.push(j);
            }
        }
        Coweight::new(type_entries) == nu.dominant_sorted()
    }
}

/// All subspaces of F_q^n of the given dimension, as RREF bases.
pub fn enumerate_subspaces(f: &FieldCtx, n: usize, dim: usize) -> Vec<Vec<Vec<Fq>>> {
    let mut out = Vec::new();
    if dim > n {
        return out;
    }
    if dim == 0 {
        out.push(Vec::new());
        return out;
    }
    // choose pivot columns, then fill free entries
    let mut pivots = (0..dim).collect::<Vec<usize>>();
    loop {
        // free positions: (row r, col c) with c > pivots[r], c not a pivot
        let mut free = Vec::new();
        for (r, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    free.push((r, c));
                }
            }
        }
        let total = (f.q as u64).pow(free.len() as u32);
        for code in 0..total {
            let mut rows = vec![vec![Fq::ZERO; n]; dim];
            for (r, &pc) in pivots.iter().enumerate() {
                rows[r][pc] = Fq::ONE;
            }
            let mut c = code;
            for &(r, col) in &free {
                rows[r][col] = Fq(
                    u16::try_from(c % f.q as u64).unwrap(),
                );
                c /= f.q as u64;
            }
            out.push(rows);
        }
        // next pivot combination
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] < n - (dim - i) {
                pivots[i] += 1;
                for j in i + 1..dim {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Every u-stable subspace of V_2 of the given colength (h = 2 only).
/// Parametrized by flags A <= B <= F^d with dim A + dim B = 2d - colength
/// plus a correction map A -> F^d / B.
pub fn enumerate_ustable_lattices(
    f: &FieldCtx,
    d: usize,
    h: usize,
    colength: usize,
) -> Vec<Lattice> {
    assert_eq!(h, 2, "enumeration is implemented for h = 2");
    let want = 2 * d - colength;
    let mut out = Vec::new();
    for a in 0..=d.min(want) {
        let b = want - a;
        if b > d || a > b {
            continue;
        }
        for bbasis in enumerate_subspaces(f, d, b) {
            // subspaces A inside B, via coordinates on B
            for acoords in enumerate_subspaces(f, b, a) {
                let abasis: Vec<Vec<Fq>> = acoords
                    .iter()
                    .map(|cv| {
                        let mut v = vec![Fq::ZERO; d];
                        for (bi, &c) in cv.iter().enumerate() {
                            for t in 0..d {
                                v[t] = f.add(v[t], f.mul(c, bbasis[bi][t]));
                            }
                        }
                        v
                    })
                    .collect();
                // complement representatives of B in F^d
                let mut bmat = bbasis.clone();
                let mut comp = Vec::new();
                for i in 0..d {
                    let mut e = vec![Fq::ZERO; d];
                    e[i] = Fq::ONE;
                    let mut test = bmat.clone();
                    test.push(e.clone());
                    if rref(f, &mut test) > bmat.len() {
                        bmat.push(e.clone());
                        comp.push(e);
                    }
                }
                let corr_dim = a * comp.len();
                let total = (f.q as u64).pow(corr_dim as u32);
                for code in 0..total {
                    let mut c = code;
                    let mut gens = Vec::new();
                    for av in &abasis {
                        let mut v = vec![Fq::ZERO; 2 * d];
                        v[..d].copy_from_slice(av);
                        for cv in &comp {
                            let coef = Fq(u16::try_from(c % f.q as u64).unwrap());
                            c /= f.q as u64;
                            for t in 0..d {
                                v[d + t] = f.add(v[d + t], f.mul(coef, cv[t]));
                            }
                        }
                        gens.push(v);
                    }
                    for bv in &bbasis {
                        let mut v = vec![Fq::ZERO; 2 * d];
                        v[d..].copy_from_slice(bv);
                        gens.push(v);
                    }
                    let lat = Lattice::from_generators(f, d, 2, &gens);
                    debug_assert_eq!(lat.colength(), colength);
                    out.push(lat);
                }
            }
        }
    }
    out
}

//! Integer coweights with dominance order, the h-dual twist, root pairings,
//! and the Schubert dimension formula.

use super::GrassmannError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coweight {
    entries: Vec<i64>,
}

impl Coweight {
    pub fn new(entries: Vec<i64>) -> Self {
        Coweight { entries }
    }

    pub fn from_slice(entries: &[i64]) -> Self {
        Coweight {
            entries: entries.to_vec(),
        }
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.entries.iter().sum()
    }

    pub fn is_dominant(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn dominant_sorted(&self) -> Coweight {
        let mut e = self.entries.clone();
        e.sort_unstable_by(|a, b| b.cmp(a));
        Coweight { entries: e }
    }

    /// The h-dual: entry i becomes h - entry(d-1-i). Entries must lie in [0, h].
    pub fn dual(&self, h: i64) -> Result<Coweight, GrassmannError> {
        if self.entries.iter().any(|&x| x < 0 || x > h) {
            return Err(GrassmannError::OutOfRange(format!(
                "entries {:?} not within [0, {h}]",
                self.entries
            )));
        }
        let d = self.entries.len();
        Ok(Coweight {
            entries: (0..d).map(|i| h - self.entries[d - 1 - i]).collect(),
        })
    }

    /// Dominance: equal totals and every bottom partial sum weakly larger.
    pub fn dominance_leq(&self, other: &Coweight) -> bool {
        assert_eq!(self.len(), other.len());
        if self.sum() != other.sum() {
            return false;
        }
        let mut acc_s = 0i64;
        let mut acc_o = 0i64;
        for j in (0..self.len()).rev() {
            acc_s += self.entries[j];
            acc_o += other.entries[j];
            if acc_s < acc_o {
                return false;
            }
        }
        true
    }

    /// Dimension of the Schubert variety: sum of eta_j - eta_l over j < l.
    pub fn schubert_dim(&self) -> i64 {
        let d = self.entries.len();
        let mut s = 0;
        for j in 0..d {
            for l in j + 1..d {
                s += self.entries[j] - self.entries[l];
            }
        }
        s
    }

    /// <2 rho, mu>; agrees with `schubert_dim` on dominant inputs.
    pub fn two_rho_pairing(&self) -> i64 {
        let d = self.entries.len() as i64;
        self.entries
            .iter()
            .enumerate()
            .map(|(i, &x)| x * (d - 1 - 2 * i as i64))
            .sum()
    }

    /// <rho, mu> for d = 3: first entry minus last.
    pub fn rho_pairing_d3(&self) -> i64 {
        assert_eq!(self.len(), 3);
        self.entries[0] - self.entries[2]
    }

    /// <alpha, mu> = mu_1 - mu_2 (d = 3).
    pub fn alpha(&self) -> i64 {
        assert_eq!(self.len(), 3);
        self.entries[0] - self.entries[1]
    }

    /// <beta, mu> = mu_2 - mu_3 (d = 3).
    pub fn beta(&self) -> i64 {
        assert_eq!(self.len(), 3);
        self.entries[1] - self.entries[2]
    }

    /// <gamma, mu> = mu_1 - mu_3 (d = 3).
    pub fn gamma(&self) -> i64 {
        assert_eq!(self.len(), 3);
        self.entries[0] - self.entries[2]
    }

    pub fn add(&self, other: &Coweight) -> Coweight {
        Coweight {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Coweight) -> Coweight {
        Coweight {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// All dominant coweights of length d with entries in [0, h] and given sum.
    pub fn enumerate_dominant(d: usize, h: i64, total: i64) -> Vec<Coweight> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(d);
        fn rec(d: usize, h: i64, total: i64, cur: &mut Vec<i64>, out: &mut Vec<Coweight>) {
            if cur.len() == d {
                if total == 0 {
                    out.push(Coweight::new(cur.clone()));
                }
                return;
            }
            let hi = cur.last().copied().unwrap_or(h).min(total);
            for v in (0..=hi).rev() {
                cur.push(v);
                rec(d, h, total - v, cur, out);
                cur.pop();
            }
        }
        rec(d, h, total, &mut cur, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cw(e: &[i64]) -> Coweight {
        Coweight::from_slice(e)
    }

    #[test]
    fn dual_examples() {
        // (2,1,0) is self-dual at h=2
        assert_eq!(cw(&[2, 1, 0]).dual(2).unwrap(), cw(&[2, 1, 0]));
        assert_eq!(cw(&[1, 1, 1]).dual(2).unwrap(), cw(&[1, 1, 1]));
        assert_eq!(cw(&[2, 2, 0]).dual(2).unwrap(), cw(&[2, 0, 0]));
        assert!(cw(&[3, 1, 0]).dual(2).is_err());
    }

    #[test]
    fn dual_is_involutive() {
        for h in 1..=3 {
            for cwt in Coweight::enumerate_dominant(3, h, h) {
                assert_eq!(cwt.dual(h).unwrap().dual(h).unwrap(), cwt);
            }
        }
    }

    #[test]
    fn dominance_examples() {
        assert!(cw(&[1, 1, 1]).dominance_leq(&cw(&[2, 1, 0])));
        assert!(cw(&[2, 1, 0]).dominance_leq(&cw(&[2, 1, 0])));
        assert!(!cw(&[3, 0, 0]).dominance_leq(&cw(&[2, 1, 0])));
        // unequal totals never compare
        assert!(!cw(&[1, 0, 0]).dominance_leq(&cw(&[2, 1, 0])));
    }

    #[test]
    fn schubert_dim_examples() {
        assert_eq!(cw(&[2, 1, 0]).schubert_dim(), 4);
        assert_eq!(cw(&[1, 1, 1]).schubert_dim(), 0);
        assert_eq!(cw(&[4, 2, 0]).schubert_dim(), 8);
    }

    #[test]
    fn schubert_dim_is_two_rho() {
        for cwt in Coweight::enumerate_dominant(3, 4, 6) {
            assert_eq!(cwt.schubert_dim(), cwt.two_rho_pairing());
        }
    }
}

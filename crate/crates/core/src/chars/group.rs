//! Brute-force group tables for GL_n(F_q) at desk scale: elements,
//! conjugacy classes, centralizer orders, element orders, p-regularity.

use crate::ring::{FieldCtx, Fq};

type Mat = Vec<Fq>; // n x n row-major

fn mat_mul(f: &FieldCtx, n: usize, a: &Mat, b: &Mat) -> Mat {
    let mut out = vec![Fq::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = f.add(out[i * n + j], f.mul(aik, b[k * n + j]));
            }
        }
    }
    out
}

fn mat_identity(n: usize) -> Mat {
    let mut m = vec![Fq::ZERO; n * n];
    for i in 0..n {
        m[i * n + i] = Fq::ONE;
    }
    m
}

fn is_invertible(f: &FieldCtx, n: usize, m: &Mat) -> bool {
    let mut a: Vec<Vec<Fq>> = (0..n).map(|i| m[i * n..(i + 1) * n].to_vec()).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..n).find(|&r| !a[r][col].is_zero()) else {
            return false;
        };
        a.swap(rank, p);
        let inv = f.inv(a[rank][col]).unwrap();
        for x in a[rank].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for r in 0..n {
            if r != rank && !a[r][col].is_zero() {
                let factor = a[r][col];
                for c in 0..n {
                    let t = f.mul(factor, a[rank][c]);
                    a[r][c] = f.sub(a[r][c], t);
                }
            }
        }
        rank += 1;
    }
    true
}

fn mat_inv(f: &FieldCtx, n: usize, m: &Mat) -> Mat {
    let mut a: Vec<Vec<Fq>> = (0..n).map(|i| m[i * n..(i + 1) * n].to_vec()).collect();
    let mut inv: Vec<Vec<Fq>> = (0..n)
        .map(|i| {
            let mut row = vec![Fq::ZERO; n];
            row[i] = Fq::ONE;
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero()).expect("invertible");
        a.swap(col, p);
        inv.swap(col, p);
        let s = f.inv(a[col][col]).unwrap();
        for x in a[col].iter_mut() {
            *x = f.mul(*x, s);
        }
        for x in inv[col].iter_mut() {
            *x = f.mul(*x, s);
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col];
                for c in 0..n {
                    let t = f.mul(factor, a[col][c]);
                    a[r][c] = f.sub(a[r][c], t);
                    let t = f.mul(factor, inv[col][c]);
                    inv[r][c] = f.sub(inv[r][c], t);
                }
            }
        }
    }
    inv.concat()
}

pub struct GroupTable {
    pub n: usize,
    pub q: u32,
    pub p: u32,
    pub elements: Vec<Mat>,
    index: std::collections::HashMap<Mat, usize>,
    /// Conjugacy class id per element.
    pub class_of: Vec<usize>,
    /// One representative per class.
    pub class_reps: Vec<usize>,
    pub class_sizes: Vec<usize>,
    pub element_orders: Vec<u64>,
    /// Order prime to p.
    pub p_regular_class: Vec<bool>,
}

impl GroupTable {
    /// Enumerate GL_n(F_q) and its conjugacy structure. Sized for
    /// |GL_3(F_2)| = 168 and |GL_2(F_3)| = 48.
    pub fn gl(f: &FieldCtx, n: usize) -> GroupTable {
        let q = f.q;
        let total = (q as u64).pow((n * n) as u32);
        let mut elements = Vec::new();
        for code in 0..total {
            let mut c = code;
            let mut m = vec![Fq::ZERO; n * n];
            for v in m.iter_mut() {
                *v = Fq((c % q as u64) as u16);
                c /= q as u64;
            }
            if is_invertible(f, n, &m) {
                elements.push(m);
            }
        }
        let index: std::collections::HashMap<Mat, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        // conjugacy classes by orbit sweep
        let mut class_of = vec![usize::MAX; elements.len()];
        let mut class_reps = Vec::new();
        let mut class_sizes = Vec::new();
        for i in 0..elements.len() {
            if class_of[i] != usize::MAX {
                continue;
            }
            let cid = class_reps.len();
            class_reps.push(i);
            let mut size = 0;
            let mut stack = vec![i];
            class_of[i] = cid;
            size += 1;
            while let Some(j) = stack.pop() {
                for g in &elements {
                    let gi = mat_inv(f, n, g);
                    let conj = mat_mul(f, n, &mat_mul(f, n, g, &elements[j]), &gi);
                    let t = index[&conj];
                    if class_of[t] == usize::MAX {
                        class_of[t] = cid;
                        size += 1;
                        stack.push(t);
                    }
                }
            }
            class_sizes.push(size);
        }
        let element_orders: Vec<u64> = elements
            .iter()
            .map(|m| {
                let id = mat_identity(n);
                let mut acc = m.clone();
                let mut ord = 1u64;
                while acc != id {
                    acc = mat_mul(f, n, &acc, m);
                    ord += 1;
                }
                ord
            })
            .collect();
        let p_regular_class = class_reps
            .iter()
            .map(|&r| element_orders[r] % f.p as u64 != 0)
            .collect();
        GroupTable {
            n,
            q,
            p: f.p,
            elements,
            index,
            class_of,
            class_reps,
            class_sizes,
            element_orders,
            p_regular_class,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_reps.len()
    }

    pub fn index_of(&self, m: &Mat) -> usize {
        self.index[m]
    }

    pub fn mul(&self, f: &FieldCtx, a: usize, b: usize) -> usize {
        self.index[&mat_mul(f, self.n, &self.elements[a], &self.elements[b])]
    }

    pub fn inv(&self, f: &FieldCtx, a: usize) -> usize {
        self.index[&mat_inv(f, self.n, &self.elements[a])]
    }

    /// p-regular class ids.
    pub fn p_regular_classes(&self) -> Vec<usize> {
        (0..self.num_classes())
            .filter(|&c| self.p_regular_class[c])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_f2_is_s3() {
        let f = FieldCtx::new(2, 1).unwrap();
        let g = GroupTable::gl(&f, 2);
        assert_eq!(g.order(), 6);
        assert_eq!(g.num_classes(), 3);
        // class equation
        assert_eq!(g.class_sizes.iter().sum::<usize>(), 6);
        // p = 2: regular classes are the identity and the 3-cycles
        assert_eq!(g.p_regular_classes().len(), 2);
    }

    #[test]
    fn gl2_f3_structure() {
        let f = FieldCtx::new(3, 1).unwrap();
        let g = GroupTable::gl(&f, 2);
        assert_eq!(g.order(), 48);
        assert_eq!(g.class_sizes.iter().sum::<usize>(), 48);
        // |class| * |centralizer| = |G|
        for (c, &size) in g.class_sizes.iter().enumerate() {
            assert_eq!(48 % size, 0, "class {c}");
        }
        // 8 conjugacy classes for GL_2(F_3)
        assert_eq!(g.num_classes(), 8);
    }

    #[test]
    fn gl3_f2_order() {
        let f = FieldCtx::new(2, 1).unwrap();
        let g = GroupTable::gl(&f, 3);
        assert_eq!(g.order(), 168);
        assert_eq!(g.num_classes(), 6);
        assert_eq!(g.p_regular_classes().len(), 4);
    }
}

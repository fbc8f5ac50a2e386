//! Exact linear algebra over the residue field F_{q^e}.

use crate::field::{Res, ResidueField};

/// Rows are fed one at a time and kept in reduced row-echelon form, so the
/// caller can stop as soon as the rank is full.
pub struct Echelon<'a> {
    res: &'a ResidueField,
    cols: usize,
    /// (pivot column, row with a 1 there and 0 in every other pivot column)
    rows: Vec<(usize, Vec<Res>)>,
    seen: usize,
}

impl<'a> Echelon<'a> {
    pub fn new(res: &'a ResidueField, cols: usize) -> Self {
        Echelon { res, cols, rows: Vec::new(), seen: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows_seen(&self) -> usize {
        self.seen
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.cols
    }

    /// Reduce `row` against the basis; returns true if it raised the rank.
    pub fn push(&mut self, mut row: Vec<Res>) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        self.seen += 1;
        let res = self.res;
        for (p, r) in &self.rows {
            let c = row[*p];
            if c != 0 {
                axpy(res, &mut row, res.neg(c), r);
            }
        }
        let Some(p) = row.iter().position(|&c| c != 0) else { return false };
        let inv = res.inv(row[p]).expect("nonzero pivot");
        for c in row.iter_mut() {
            *c = res.mul(*c, inv);
        }
        for (_, r) in self.rows.iter_mut() {
            let c = r[p];
            if c != 0 {
                axpy(res, r, res.neg(c), &row);
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, row));
        true
    }

    /// Basis of the right kernel, itself in reduced row-echelon form.
    pub fn kernel(&self) -> Vec<Vec<Res>> {
        let res = self.res;
        let pivots: Vec<usize> = self.rows.iter().map(|(p, _)| *p).collect();
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0; self.cols];
            v[f] = 1;
            for (p, r) in &self.rows {
                v[*p] = res.neg(r[f]);
            }
            basis.push(v);
        }
        rref(res, basis)
    }
}

fn axpy(res: &ResidueField, y: &mut [Res], a: Res, x: &[Res]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        if xi != 0 {
            *yi = res.add(*yi, res.mul(a, xi));
        }
    }
}

/// Reduced row-echelon form of the span of `rows`, zero rows dropped.
pub fn rref(res: &ResidueField, rows: Vec<Vec<Res>>) -> Vec<Vec<Res>> {
    let Some(cols) = rows.first().map(|r| r.len()) else { return rows };
    let mut e = Echelon::new(res, cols);
    for r in rows {
        e.push(r);
    }
    e.rows.into_iter().map(|(_, r)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat_vec(res: &ResidueField, m: &[Vec<Res>], v: &[Res]) -> Vec<Res> {
        m.iter().map(|r| r.iter().zip(v).fold(0, |acc, (&a, &b)| res.add(acc, res.mul(a, b)))).collect()
    }

    #[test]
    fn small_kernel() {
        let res = ResidueField::new(3, 1).unwrap();
        let m = vec![vec![1, 2, 0], vec![0, 1, 1]];
        let mut e = Echelon::new(&res, 3);
        for r in &m {
            assert!(e.push(r.clone()));
        }
        assert!(!e.push(vec![1, 0, 1]));
        let k = e.kernel();
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&res, &m, &k[0]).iter().all(|&x| x == 0));
        // reduced: leading entry 1
        assert_eq!(k[0].iter().find(|&&x| x != 0), Some(&1));
    }

    proptest! {
        #[test]
        fn rank_nullity(seed in prop::collection::vec(0u32..9, 4 * 6)) {
            let res = ResidueField::new(3, 2).unwrap();
            let m: Vec<Vec<Res>> = seed.chunks(6).map(|c| c.to_vec()).collect();
            let mut e = Echelon::new(&res, 6);
            for r in &m {
                e.push(r.clone());
            }
            let k = e.kernel();
            prop_assert_eq!(e.rank() + k.len(), 6);
            for v in &k {
                prop_assert!(mat_vec(&res, &m, v).iter().all(|&x| x == 0));
            }
        }
    }
}

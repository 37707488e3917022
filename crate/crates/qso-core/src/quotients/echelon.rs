//! Sparse row echelon form over a fixed column order.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::ring::Coeff;

pub type SparseVec<C> = BTreeMap<usize, C>;

/// Rows normalized to a leading 1; a row with pivot `p` has no entries
/// left of `p`.
#[derive(Clone, Debug)]
pub struct Echelon<C> {
    rows: BTreeMap<usize, SparseVec<C>>,
    tol: f64,
}

impl<C: Coeff> Echelon<C> {
    /// `tol = 0` means exact arithmetic.
    pub fn new(tol: f64) -> Self {
        Echelon {
            rows: BTreeMap::new(),
            tol,
        }
    }

    fn negligible(&self, c: &C) -> bool {
        if self.tol == 0.0 {
            c.is_zero()
        } else {
            c.magnitude() <= self.tol
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Remove every pivot column from `v` by subtracting rows.
    pub fn reduce(&self, mut v: SparseVec<C>) -> SparseVec<C> {
        v.retain(|_, c| !self.negligible(c));
        let mut from = 0;
        loop {
            let hit = v
                .range(from..)
                .map(|(k, _)| *k)
                .find(|k| self.rows.contains_key(k));
            let Some(p) = hit else {
                break;
            };
            let c = v.remove(&p).expect("hit is a key");
            for (j, x) in self.rows[&p].range(p + 1..) {
                let e = v.entry(*j).or_insert_with(C::zero);
                *e = e.sub(&c.mul(x));
                if self.negligible(e) {
                    v.remove(j);
                }
            }
            from = p + 1;
        }
        v
    }

    /// Add `v` to the row space; false if it was already in the span.
    pub fn insert(&mut self, v: SparseVec<C>) -> Result<bool> {
        let v = self.reduce(v);
        let Some((&p, lead)) = v.iter().next() else {
            return Ok(false);
        };
        let inv = C::one().div(lead)?;
        let row: SparseVec<C> = v.iter().map(|(k, c)| (*k, c.mul(&inv))).collect();
        self.rows.insert(p, row);
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::GaussRat;

    fn sv(e: &[(usize, i64)]) -> SparseVec<GaussRat> {
        e.iter()
            .map(|(k, c)| (*k, GaussRat::from_int(*c)))
            .collect()
    }

    #[test]
    fn rank_and_reduction() {
        let mut e = Echelon::new(0.0);
        assert!(e.insert(sv(&[(0, 1), (2, 1)])).unwrap());
        assert!(e.insert(sv(&[(0, 1), (1, 1)])).unwrap());
        assert!(!e.insert(sv(&[(1, 2), (2, -2)])).unwrap());
        assert_eq!(e.rank(), 2);
        let r = e.reduce(sv(&[(0, 3), (1, 1), (2, 0)]));
        assert_eq!(r.keys().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(r[&2], GaussRat::from_int(-2));
    }
}

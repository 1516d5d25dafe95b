use std::collections::{BTreeMap, BTreeSet};

use super::{Scalar, SparseMatrix};
use crate::error::{Error, Result};

/// `u * a * v = diag(diagonal)`, with `u`, `v` unimodular.
///
/// `diagonal` has length `min(rows, cols)`; its nonzero entries come first,
/// are positive and divide each other in order.
#[derive(Clone, Debug)]
pub struct SmithForm<T: Scalar> {
    pub diagonal: Vec<T>,
    pub u: SparseMatrix<T>,
    pub u_inv: SparseMatrix<T>,
    pub v: SparseMatrix<T>,
    pub v_inv: SparseMatrix<T>,
}

impl<T: Scalar> SmithForm<T> {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !d.is_zero()).count()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<T> {
        self.diagonal
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect()
    }
}

/// Sparse matrix with row maps and column supports, for elimination.
struct Work<T> {
    rows: Vec<BTreeMap<usize, T>>,
    cols: Vec<BTreeSet<usize>>,
}

impl<T: Scalar> Work<T> {
    fn from_matrix(a: &SparseMatrix<T>) -> Self {
        let mut w = Work {
            rows: vec![BTreeMap::new(); a.rows()],
            cols: vec![BTreeSet::new(); a.cols()],
        };
        for (r, c, v) in a.iter() {
            w.rows[r].insert(c, v.clone());
            w.cols[c].insert(r);
        }
        w
    }

    fn identity(n: usize) -> Self {
        Self::from_matrix(&SparseMatrix::identity(n))
    }

    fn into_matrix(self) -> SparseMatrix<T> {
        let nr = self.rows.len();
        let nc = self.cols.len();
        let triplets = self
            .rows
            .into_iter()
            .enumerate()
            .flat_map(|(r, row)| row.into_iter().map(move |(c, v)| (r, c, v)));
        SparseMatrix::from_triplets(nr, nc, triplets).expect("indices in range")
    }

    fn get(&self, r: usize, c: usize) -> Option<&T> {
        self.rows[r].get(&c)
    }

    fn add_entry(&mut self, r: usize, c: usize, v: T) {
        if v.is_zero() {
            return;
        }
        let e = self.rows[r].entry(c).or_insert_with(T::zero);
        *e = e.clone() + v;
        if e.is_zero() {
            self.rows[r].remove(&c);
            self.cols[c].remove(&r);
        } else {
            self.cols[c].insert(r);
        }
    }

    /// row `dst` += f * row `src`
    fn row_axpy(&mut self, dst: usize, src: usize, f: &T) {
        if f.is_zero() {
            return;
        }
        let src_row: Vec<(usize, T)> = self.rows[src].iter().map(|(&c, v)| (c, v.clone())).collect();
        for (c, v) in src_row {
            self.add_entry(dst, c, f.clone() * v);
        }
    }

    /// col `dst` += f * col `src`
    fn col_axpy(&mut self, dst: usize, src: usize, f: &T) {
        if f.is_zero() {
            return;
        }
        let src_col: Vec<usize> = self.cols[src].iter().copied().collect();
        for r in src_col {
            let v = self.rows[r][&src].clone();
            self.add_entry(r, dst, f.clone() * v);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for &c in self.rows[a].keys() {
            self.cols[c].remove(&a);
        }
        for &c in self.rows[b].keys() {
            self.cols[c].remove(&b);
        }
        self.rows.swap(a, b);
        for &c in self.rows[a].keys() {
            self.cols[c].insert(a);
        }
        for &c in self.rows[b].keys() {
            self.cols[c].insert(b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let ra: Vec<usize> = self.cols[a].iter().copied().collect();
        let rb: Vec<usize> = self.cols[b].iter().copied().collect();
        let mut take = |r: usize, c: usize| self.rows[r].remove(&c).map(|v| (r, v));
        let va: Vec<(usize, T)> = ra.iter().filter_map(|&r| take(r, a)).collect();
        let vb: Vec<(usize, T)> = rb.iter().filter_map(|&r| take(r, b)).collect();
        for (r, v) in va {
            self.rows[r].insert(b, v);
        }
        for (r, v) in vb {
            self.rows[r].insert(a, v);
        }
        self.cols.swap(a, b);
    }

    fn negate_row(&mut self, r: usize) {
        for v in self.rows[r].values_mut() {
            *v = -v.clone();
        }
    }

    fn negate_col(&mut self, c: usize) {
        let rows: Vec<usize> = self.cols[c].iter().copied().collect();
        for r in rows {
            let v = self.rows[r].get_mut(&c).expect("column support in sync");
            *v = -v.clone();
        }
    }
}

/// Records the unimodular transforms alongside the elimination.
struct Transforms<T> {
    u: Work<T>,
    u_inv: Work<T>,
    v: Work<T>,
    v_inv: Work<T>,
}

struct Eliminator<T> {
    a: Work<T>,
    t: Option<Transforms<T>>,
}

impl<T: Scalar> Eliminator<T> {
    fn row_axpy(&mut self, dst: usize, src: usize, f: &T) {
        self.a.row_axpy(dst, src, f);
        if let Some(t) = &mut self.t {
            t.u.row_axpy(dst, src, f);
            t.u_inv.col_axpy(src, dst, &-f.clone());
        }
    }

    fn col_axpy(&mut self, dst: usize, src: usize, f: &T) {
        self.a.col_axpy(dst, src, f);
        if let Some(t) = &mut self.t {
            t.v.col_axpy(dst, src, f);
            t.v_inv.row_axpy(src, dst, &-f.clone());
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.a.swap_rows(a, b);
        if let Some(t) = &mut self.t {
            t.u.swap_rows(a, b);
            t.u_inv.swap_cols(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.a.swap_cols(a, b);
        if let Some(t) = &mut self.t {
            t.v.swap_cols(a, b);
            t.v_inv.swap_rows(a, b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        self.a.negate_row(r);
        if let Some(t) = &mut self.t {
            t.u.negate_row(r);
            t.u_inv.negate_col(r);
        }
    }

    /// Smallest-magnitude entry in rows and columns `>= k`, ties broken by
    /// `(row, col)`. Stops at the first unit found in row order.
    fn find_pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(T, usize, usize)> = None;
        for r in k..self.a.rows.len() {
            for (&c, v) in self.a.rows[r].range(k..) {
                let m = v.abs();
                if best.as_ref().is_none_or(|(b, _, _)| m < *b) {
                    let unit = m.is_one();
                    best = Some((m, r, c));
                    if unit {
                        return best.map(|(_, r, c)| (r, c));
                    }
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    /// Smallest-magnitude off-pivot entry in row `k` or column `k`, if any.
    fn smallest_in_cross(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(T, usize, usize)> = None;
        let consider = |m: T, r: usize, c: usize, best: &mut Option<(T, usize, usize)>| {
            if best.as_ref().is_none_or(|(b, _, _)| m < *b) {
                *best = Some((m, r, c));
            }
        };
        for &r in self.a.cols[k].range(k + 1..) {
            consider(self.a.rows[r][&k].abs(), r, k, &mut best);
        }
        for (&c, v) in self.a.rows[k].range(k + 1..) {
            consider(v.abs(), k, c, &mut best);
        }
        best.map(|(_, r, c)| (r, c))
    }

    fn run(&mut self) -> Vec<T> {
        let nr = self.a.rows.len();
        let nc = self.a.cols.len();
        let n = nr.min(nc);
        let mut diag = Vec::with_capacity(n);
        let mut k = 0;
        while k < n {
            let Some((r, c)) = self.find_pivot(k) else { break };
            self.swap_rows(k, r);
            self.swap_cols(k, c);
            loop {
                // clear column k below the pivot
                let p = self.a.get(k, k).expect("pivot").clone();
                let below: Vec<usize> = self.a.cols[k].range(k + 1..).copied().collect();
                for i in below {
                    let q = self.a.rows[i][&k].clone() / p.clone();
                    self.row_axpy(i, k, &-q);
                }
                // clear row k right of the pivot
                let right: Vec<usize> = self.a.rows[k].range(k + 1..).map(|(&c, _)| c).collect();
                for j in right {
                    let q = self.a.rows[k][&j].clone() / p.clone();
                    self.col_axpy(j, k, &-q);
                }
                if let Some((r, c)) = self.smallest_in_cross(k) {
                    // a remainder smaller than the pivot survived; make it the pivot
                    self.swap_rows(k, r);
                    self.swap_cols(k, c);
                    continue;
                }
                // divisibility of the remaining block by the pivot
                if !p.abs().is_one() {
                    let bad = (k + 1..nr).find(|&i| {
                        self.a.rows[i]
                            .range(k + 1..)
                            .any(|(_, v)| !(v.clone() % p.clone()).is_zero())
                    });
                    if let Some(i) = bad {
                        self.row_axpy(k, i, &T::one());
                        continue;
                    }
                }
                break;
            }
            if self.a.get(k, k).expect("pivot").is_negative() {
                self.negate_row(k);
            }
            diag.push(self.a.get(k, k).expect("pivot").clone());
            k += 1;
        }
        diag.resize(n, T::zero());
        diag
    }
}

/// Smith normal form with transforms. Pivots are chosen by smallest magnitude,
/// ties broken by `(row, col)`, so the result is deterministic.
pub fn smith_normal_form<T: Scalar>(a: &SparseMatrix<T>) -> SmithForm<T> {
    let mut e = Eliminator {
        a: Work::from_matrix(a),
        t: Some(Transforms {
            u: Work::identity(a.rows()),
            u_inv: Work::identity(a.rows()),
            v: Work::identity(a.cols()),
            v_inv: Work::identity(a.cols()),
        }),
    };
    let diagonal = e.run();
    let t = e.t.expect("transforms tracked");
    SmithForm {
        diagonal,
        u: t.u.into_matrix(),
        u_inv: t.u_inv.into_matrix(),
        v: t.v.into_matrix(),
        v_inv: t.v_inv.into_matrix(),
    }
}

/// Nonzero invariant factors, without computing transforms.
pub fn invariant_factors<T: Scalar>(a: &SparseMatrix<T>) -> Vec<T> {
    let mut e = Eliminator {
        a: Work::from_matrix(a),
        t: None,
    };
    let mut d = e.run();
    d.retain(|x| !x.is_zero());
    d
}

/// An integer solution of `a x = b`, or `None` when there is none.
///
/// The solution returned has zero coordinates along the kernel directions of
/// the Smith transform, which makes it canonical for a given matrix.
pub fn solve_integer<T: Scalar>(a: &SparseMatrix<T>, b: &[T]) -> Result<Option<Vec<T>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let snf = smith_normal_form(a);
    Ok(solve_with(&snf, a.cols(), b))
}

/// Solves `a x = b` given the Smith form of `a`.
pub(crate) fn solve_with<T: Scalar>(snf: &SmithForm<T>, cols: usize, b: &[T]) -> Option<Vec<T>> {
    let c = snf.u.mul_vec(b).expect("dimensions checked");
    let r = snf.rank();
    if c[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut y = vec![T::zero(); cols];
    for i in 0..r {
        let (q, rem) = c[i].div_rem(&snf.diagonal[i]);
        if !rem.is_zero() {
            return None;
        }
        y[i] = q;
    }
    Some(snf.v.mul_vec(&y).expect("square transform"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Int;
    use proptest::prelude::*;

    fn check(a: &SparseMatrix<i64>) -> SmithForm<i64> {
        let s = smith_normal_form(a);
        let prod = s.u.mul(a).unwrap().mul(&s.v).unwrap();
        for (r, c, v) in prod.iter() {
            assert_eq!(r, c, "off-diagonal entry in {:?}", prod);
            assert_eq!(*v, s.diagonal[r]);
        }
        let n = a.rows();
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), SparseMatrix::identity(n));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), SparseMatrix::identity(a.cols()));
        let r = s.rank();
        for i in 1..r {
            assert_eq!(s.diagonal[i] % s.diagonal[i - 1], 0);
        }
        assert!(s.diagonal[r..].iter().all(|x| *x == 0));
        s
    }

    #[test]
    fn textbook_examples() {
        let a = SparseMatrix::from_dense(&[vec![2i64, 4], vec![6, 8]]).unwrap();
        assert_eq!(check(&a).diagonal, vec![2, 4]);
        let i = SparseMatrix::<i64>::identity(3);
        let s = check(&i);
        assert_eq!(s.diagonal, vec![1, 1, 1]);
        assert_eq!(s.u, i);
        assert_eq!(s.v, i);
        let z = SparseMatrix::<i64>::zeros(2, 3);
        assert_eq!(check(&z).diagonal, vec![0, 0]);
        let b = SparseMatrix::from_dense(&[vec![2i64, 0], vec![0, 3]]).unwrap();
        assert_eq!(check(&b).diagonal, vec![1, 6]);
    }

    #[test]
    fn solving() {
        let a = SparseMatrix::from_dense(&[vec![2i64]]).unwrap();
        assert_eq!(solve_integer(&a, &[4]).unwrap(), Some(vec![2]));
        assert_eq!(solve_integer(&a, &[3]).unwrap(), None);
        assert!(solve_integer(&a, &[3, 1]).is_err());
    }

    #[test]
    fn big_integers() {
        let a = SparseMatrix::<Int>::from_dense(&[
            vec![Int::from(6), Int::from(10)],
            vec![Int::from(15), Int::from(35)],
        ])
        .unwrap();
        assert_eq!(invariant_factors(&a), vec![Int::from(1), Int::from(60)]);
    }

    proptest! {
        #[test]
        fn random_matrices(rows in 0usize..6, cols in 0usize..6, seed in proptest::collection::vec(-6i64..7, 36)) {
            let dense: Vec<Vec<i64>> = (0..rows).map(|r| (0..cols).map(|c| if seed[r * 6 + c].abs() > 3 { 0 } else { seed[r * 6 + c] }).collect()).collect();
            let a = if rows == 0 { SparseMatrix::zeros(0, cols) } else { SparseMatrix::from_dense(&dense).unwrap() };
            let s = check(&a);
            let nz: Vec<i64> = s.diagonal.iter().copied().filter(|x| *x != 0).collect();
            prop_assert_eq!(invariant_factors(&a), nz);
            let b = a.mul_vec(&(0..cols as i64).collect::<Vec<_>>()).unwrap();
            let x = solve_integer(&a, &b).unwrap();
            prop_assert!(x.is_some());
            prop_assert_eq!(a.mul_vec(&x.unwrap()).unwrap(), b);
        }
    }
}

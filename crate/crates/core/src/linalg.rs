//! Exact linear algebra over the rationals.
//!
//! Dense matrices cover the small systems that come out of structure tables;
//! the sparse row-echelon accumulator covers relation spaces of word models,
//! whose vectors are short but live in large ambient dimensions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::{rat, Rat};

/// Dense matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let v = a * b;
                        out[(i, j)] += v;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += y;
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Mat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= c;
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        let mut out = vec![Rat::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if !a.is_zero() && !v[j].is_zero() {
                    out[i] += a * &v[j];
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u64) -> Mat {
        assert_eq!(self.rows, self.cols, "power of a non-square matrix");
        let mut out = Mat::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Kronecker product; used to spread an action across tensor factors.
    pub fn kronecker(&self, other: &Mat) -> Mat {
        let mut out = Mat::zero(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        let b = &other[(p, q)];
                        if !b.is_zero() {
                            out[(i * other.rows + p, j * other.cols + q)] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = {
                let p = m[(r, c)].clone();
                Rat::one() / p
            };
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(i, j)] - &(&f * &m[(r, j)]);
                        m[(i, j)] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel (null space), one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, free)].clone();
            }
            out.push(v);
        }
        out
    }

    /// Solves `self * x = b`; `None` when inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len(), "shape mismatch");
        let mut aug = Mat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut out = Mat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Sparse vector keyed by coordinate index.
pub type SparseVec = BTreeMap<usize, Rat>;

pub fn sparse_add_scaled(dst: &mut SparseVec, src: &SparseVec, c: &Rat) {
    if c.is_zero() {
        return;
    }
    for (i, v) in src {
        let entry = dst.entry(*i).or_insert_with(Rat::zero);
        *entry += v * c;
        if entry.is_zero() {
            dst.remove(i);
        }
    }
}

pub fn sparse_scale(v: &SparseVec, c: &Rat) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(i, x)| (*i, x * c)).collect()
}

pub fn sparse_from_dense(v: &[Rat]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sparse_to_dense(v: &SparseVec, dim: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); dim];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// Incremental row-echelon accumulator over sparse vectors.
///
/// Rows are kept fully reduced against each other and indexed by pivot
/// coordinate, so membership tests and quotient coordinates are direct.
#[derive(Debug, Clone, Default)]
pub struct SparseRref {
    /// pivot index -> reduced row with leading coefficient 1 at that index.
    rows: BTreeMap<usize, SparseVec>,
}

impl SparseRref {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&usize, &SparseVec)> {
        self.rows.iter()
    }

    /// Reduces `v` against the accumulated rows.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        loop {
            let Some((&p, c)) = v.iter().find(|(i, _)| self.rows.contains_key(i)) else {
                return v;
            };
            let c = c.clone();
            let row = self.rows[&p].clone();
            sparse_add_scaled(&mut v, &row, &(-c));
        }
    }

    /// Inserts `v`; returns true when it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let mut v = self.reduce(v);
        let Some((&p, c)) = v.iter().next() else {
            return false;
        };
        let inv = Rat::one() / c.clone();
        v = sparse_scale(&v, &inv);
        // Back-substitute into existing rows to stay fully reduced.
        let affected: Vec<usize> = self
            .rows
            .iter()
            .filter(|(_, row)| row.contains_key(&p))
            .map(|(k, _)| *k)
            .collect();
        for k in affected {
            let c = self.rows[&k][&p].clone();
            let mut row = self.rows.remove(&k).unwrap();
            sparse_add_scaled(&mut row, &v, &(-c));
            self.rows.insert(k, row);
        }
        self.rows.insert(p, v);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Coordinates of the class of `v` on the non-pivot indices of an ambient
    /// space of dimension `dim`, i.e. the quotient coordinates.
    pub fn quotient_coords(&self, v: &SparseVec, dim: usize) -> Vec<Rat> {
        let reduced = self.reduce(v);
        let free: Vec<usize> = (0..dim).filter(|i| !self.rows.contains_key(i)).collect();
        free.iter()
            .map(|i| reduced.get(i).cloned().unwrap_or_else(Rat::zero))
            .collect()
    }

    /// Indices that survive into the quotient basis.
    pub fn free_indices(&self, dim: usize) -> Vec<usize> {
        (0..dim).filter(|i| !self.rows.contains_key(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratq;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_rank_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 1, 1]]);
        assert_eq!(a.rank(), 2);
        let ker = a.kernel_basis();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            assert!(a.apply(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let x = a.solve(&[rat(3), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(2));
        let sing = m(&[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().is_none());
        assert!(sing.solve(&[rat(1), rat(3)]).is_none());
    }

    #[test]
    fn kronecker_shapes_and_values() {
        let a = m(&[&[0, 1], &[1, 0]]);
        let b = m(&[&[2]]);
        let k = a.kronecker(&b);
        assert_eq!((k.rows, k.cols), (2, 2));
        assert_eq!(k[(0, 1)], rat(2));
        let i4 = Mat::identity(2).kronecker(&Mat::identity(2));
        assert_eq!(i4, Mat::identity(4));
    }

    #[test]
    fn sparse_rref_membership_and_quotient() {
        let mut sp = SparseRref::new();
        // x0 - x1 and x1 - x2 identify the first three coordinates.
        let v1 = sparse_from_dense(&[rat(1), rat(-1), rat(0), rat(0)]);
        let v2 = sparse_from_dense(&[rat(0), rat(1), rat(-1), rat(0)]);
        assert!(sp.insert(&v1));
        assert!(sp.insert(&v2));
        assert!(!sp.insert(&sparse_from_dense(&[rat(1), rat(0), rat(-1), rat(0)])));
        assert_eq!(sp.rank(), 2);
        assert_eq!(sp.free_indices(4), vec![2, 3]);
        // x0 maps to the class of x2.
        let q = sp.quotient_coords(&sparse_from_dense(&[rat(1), rat(0), rat(0), rat(0)]), 4);
        assert_eq!(q, vec![rat(1), rat(0)]);
        let q2 = sp.quotient_coords(
            &sparse_from_dense(&[ratq(1, 2), rat(0), rat(0), rat(3)]),
            4,
        );
        assert_eq!(q2, vec![ratq(1, 2), rat(3)]);
    }

    #[test]
    fn sparse_rref_matches_dense_rank() {
        let vs: Vec<Vec<Rat>> = vec![
            vec![rat(1), rat(2), rat(3), rat(4)],
            vec![rat(2), rat(4), rat(6), rat(8)],
            vec![rat(0), rat(1), rat(0), rat(1)],
            vec![rat(1), rat(3), rat(3), rat(5)],
        ];
        let dense = Mat::from_rows(vs.clone());
        let mut sp = SparseRref::new();
        for v in &vs {
            sp.insert(&sparse_from_dense(v));
        }
        assert_eq!(sp.rank(), dense.rank());
    }
}

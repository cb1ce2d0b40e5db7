//! Exact linear algebra over the rationals: an incremental sparse echelon
//! form for relation spans and small dense matrices for basis changes and
//! design systems.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::rational::Q;

pub type SparseVec = BTreeMap<usize, Q>;

/// Incrementally maintained echelon form. Each stored row has leading entry 1
/// at its pivot column and no entries left of it.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    rows: HashMap<usize, Vec<(usize, Q)>>,
}

impl SparseEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduces `v` against the stored rows; the result has no entry in any pivot column.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(c, _)| *c).find(|c| self.rows.contains_key(c));
            let Some(c) = next else { break };
            let factor = v.remove(&c).expect("entry present");
            for (col, x) in &self.rows[&c][1..] {
                let e = v.entry(*col).or_insert_with(Q::zero);
                *e -= &factor * x;
                if e.is_zero() {
                    v.remove(col);
                }
            }
            cursor = c + 1;
        }
        v
    }

    /// Adds a row; returns `false` when it already lies in the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((&lead, lead_val)) = r.iter().next() else {
            return false;
        };
        let inv = lead_val.recip();
        let row: Vec<(usize, Q)> = r
            .iter()
            .map(|(c, x)| (*c, if *c == lead { Q::one() } else { x * &inv }))
            .collect();
        self.rows.insert(lead, row);
        true
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Q>>,
}

/// Solution set `{ particular + span(nullspace) }` of a linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub particular: Vec<Q>,
    pub nullspace: Vec<Vec<Q>>,
    pub rank: usize,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![vec![Q::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Q::one();
        }
        m
    }

    pub fn from_rows(data: Vec<Vec<Q>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { rows, cols, data }
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r][c]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c][r] = self.data[r][c].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self.data[i][k] * &other.data[k][j];
                    out.data[i][j] += t;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &v[i] * &self.data[i][j]).fold(Q::zero(), |a, b| a + b))
            .collect()
    }

    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        Matrix::from_rows((r0..r1).map(|r| self.data[r][c0..c1].to_vec()).collect())
            .with_shape(r1 - r0, c1 - c0)
    }

    fn with_shape(mut self, rows: usize, cols: usize) -> Matrix {
        self.rows = rows;
        self.cols = cols;
        if self.data.is_empty() {
            self.data = vec![Vec::new(); rows];
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    /// Reduced row echelon form; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.data[r][col].is_zero()) else {
                continue;
            };
            self.data.swap(row, p);
            let inv = self.data[row][col].recip();
            for x in self.data[row].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = self.data[row].clone();
            for r in 0..self.rows {
                if r != row && !self.data[r][col].is_zero() {
                    let f = self.data[r][col].clone();
                    for (x, p) in self.data[r].iter_mut().zip(&pivot_row) {
                        *x -= &f * p;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Q::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            det *= &a[col][col];
            let inv = a[col][col].recip();
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] * &inv;
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i][j] = self.data[i][j].clone();
            }
            aug.data[i][n + i] = Q::one();
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_rows(aug.data.into_iter().map(|r| r[n..].to_vec()).collect()).with_shape(n, n))
    }

    /// Solves `self * x = b`. Returns `None` when inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<SolutionSet> {
        assert_eq!(b.len(), self.rows);
        let n = self.cols;
        let mut aug = Matrix::zeros(self.rows, n + 1);
        for i in 0..self.rows {
            for j in 0..n {
                aug.data[i][j] = self.data[i][j].clone();
            }
            aug.data[i][n] = b[i].clone();
        }
        let piv = aug.rref();
        if piv.last() == Some(&n) {
            return None;
        }
        let mut particular = vec![Q::zero(); n];
        for (r, &c) in piv.iter().enumerate() {
            particular[c] = aug.data[r][n].clone();
        }
        let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
        let nullspace = free
            .iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); n];
                v[f] = Q::one();
                for (r, &c) in piv.iter().enumerate() {
                    v[c] = -aug.data[r][f].clone();
                }
                v
            })
            .collect();
        Some(SolutionSet { particular, nullspace, rank: piv.len() })
    }
}

impl SolutionSet {
    pub fn is_unique(&self) -> bool {
        self.nullspace.is_empty()
    }

    /// Whether `v` belongs to the affine solution set.
    pub fn contains(&self, v: &[Q]) -> bool {
        let diff: Vec<Q> = v.iter().zip(&self.particular).map(|(a, b)| a - b).collect();
        in_span(&self.nullspace, &diff)
    }

    /// Affine-set equality.
    pub fn same_set(&self, other: &SolutionSet) -> bool {
        self.nullspace.len() == other.nullspace.len()
            && self.contains(&other.particular)
            && other.nullspace.iter().all(|v| in_span(&self.nullspace, v))
    }
}

/// Whether `v` lies in the row span of `vs`.
pub fn in_span(vs: &[Vec<Q>], v: &[Q]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    if vs.is_empty() {
        return false;
    }
    let base = Matrix::from_rows(vs.to_vec()).rank();
    let mut with = vs.to_vec();
    with.push(v.to_vec());
    Matrix::from_rows(with).rank() == base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|x| q(*x)).collect()).collect())
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.det(), q(1));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), q(-1));
    }

    #[test]
    fn solve_underdetermined() {
        let a = m(&[&[1, 1, 0]]);
        let s = a.solve(&[q(3)]).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.nullspace.len(), 2);
        assert!(s.contains(&[q(1), q(2), q(7)]));
        assert!(!s.contains(&[q(1), q(1), q(0)]));
        assert!(m(&[&[1], &[1]]).solve(&[q(1), q(2)]).is_none());
    }

    #[test]
    fn sparse_echelon_span() {
        let mut e = SparseEchelon::new();
        let v = |xs: &[(usize, i64)]| xs.iter().map(|(c, x)| (*c, q(*x))).collect::<SparseVec>();
        assert!(e.insert(v(&[(0, 1), (1, -1)])));
        assert!(e.insert(v(&[(1, 1), (2, -1)])));
        assert!(!e.insert(v(&[(0, 2), (2, -2)])));
        assert_eq!(e.rank(), 2);
        let r = e.reduce(v(&[(0, 1)]));
        assert_eq!(r, v(&[(2, 1)]));
        let half: SparseVec = [(0usize, frac(1, 2))].into_iter().collect();
        assert_eq!(e.reduce(half), [(2usize, frac(1, 2))].into_iter().collect());
    }
}

//! Dense integer matrices with exact elimination routines.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{primitive_from_rational, Scalar, Q};

/// A dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<T>]) -> Option<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return None;
        }
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Some(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_cols(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut p = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    p[(i, j)] = p[(i, j)] + a * other[(k, j)];
                }
            }
        }
        p
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    /// The bilinear value `a^T M b`.
    pub fn bilinear(&self, a: &[T], b: &[T]) -> T {
        let mb = self.mul_vec(b);
        a.iter().zip(&mb).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `col[dst] += f * col[src]`.
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, f: T) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] = self[(i, dst)] + f * v;
        }
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.to_rows();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    fn to_rational(&self) -> Vec<Vec<Q<T>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|&v| Q::from_integer(v)).collect()).collect()
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let (_, pivots) = rref(self.to_rational());
        pivots.len()
    }

    /// Inverse of a unimodular matrix; `None` if the determinant is not a unit.
    pub fn inverse_unimodular(&self) -> Option<Self> {
        let inv = self.inverse_rational()?;
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !inv[i][j].is_integer() {
                    return None;
                }
                out[(i, j)] = inv[i][j].to_integer();
            }
        }
        Some(out)
    }

    /// Inverse over the rationals; `None` if singular.
    pub fn inverse_rational(&self) -> Option<Vec<Vec<Q<T>>>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = self.to_rational();
        for (i, row) in aug.iter_mut().enumerate() {
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
        }
        let (red, pivots) = rref(aug);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(red.into_iter().map(|row| row[n..].to_vec()).collect())
    }

    /// One rational solution of `M x = b`, if any exists.
    pub fn solve_rational(&self, b: &[T]) -> Option<Vec<Q<T>>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = self.to_rational();
        for (row, &v) in aug.iter_mut().zip(b) {
            row.push(Q::from_integer(v));
        }
        let (red, pivots) = rref(aug);
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = red[r][self.cols];
        }
        Some(x)
    }

    /// A basis of the rational null space, each vector scaled to be primitive integral.
    pub fn rational_kernel(&self) -> Vec<Vec<T>> {
        let (red, pivots) = rref(self.to_rational());
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -red[r][f];
                }
                primitive_from_rational(&v)
            })
            .collect()
    }

    /// A saturated basis of the integer null space `{x in Z^n : M x = 0}`.
    ///
    /// Column operations bring `M` to column echelon form `M U = [H | 0]` with `U`
    /// unimodular; the trailing columns of `U` then span the kernel over the integers.
    pub fn integer_kernel(&self) -> Vec<Vec<T>> {
        let n = self.cols;
        let mut a = self.clone();
        let mut u = Self::identity(n);
        let mut p = 0;
        for r in 0..self.rows {
            if p >= n {
                break;
            }
            for c in p + 1..n {
                while !a[(r, c)].is_zero() {
                    if a[(r, p)].is_zero() {
                        a.swap_cols(p, c);
                        u.swap_cols(p, c);
                        continue;
                    }
                    let q = a[(r, c)] / a[(r, p)];
                    a.add_col_multiple(c, p, -q);
                    u.add_col_multiple(c, p, -q);
                    if !a[(r, c)].is_zero() {
                        a.swap_cols(p, c);
                        u.swap_cols(p, c);
                    }
                }
            }
            if !a[(r, p)].is_zero() {
                p += 1;
            }
        }
        (p..n).map(|j| u.col(j)).collect()
    }
}

/// Reduced row echelon form over the rationals; returns the matrix and pivot columns.
pub fn rref<T: Scalar>(mut a: Vec<Vec<Q<T>>>) -> (Vec<Vec<Q<T>>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v = *v * inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..cols {
                    let t = a[r][j];
                    a[i][j] = a[i][j] - f * t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cols == 0 {
            return f.debug_list().finish();
        }
        f.debug_list().entries(self.data.chunks(self.cols)).finish()
    }
}

impl<T: Scalar> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(ser)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(de)?;
        Matrix::from_rows(rows).ok_or_else(|| serde::de::Error::custom("ragged matrix rows"))
    }
}

#[cfg(test)]
#[allow(clippy::erasing_op, clippy::identity_op)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix<i64> {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let a = m(&[&[2, -1, 3], &[0, 4, 1], &[5, 2, -2]]);
        // cofactor expansion along the first row
        let expected = 2 * (4 * -2 - 1 * 2) + 1 * (0 * -2 - 1 * 5) + 3 * (0 * 2 - 4 * 5);
        assert_eq!(a.det(), expected);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), -1);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), 0);
    }

    #[test]
    fn unimodular_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse_unimodular().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(m(&[&[2, 0], &[0, 1]]).inverse_unimodular().is_none());
    }

    #[test]
    fn integer_kernel_is_saturated() {
        let a = m(&[&[2, 4, 6]]);
        let k = a.integer_kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(a.mul_vec(v), vec![0]);
        }
        // together with a preimage of a generator of the image, the kernel spans Z^3
        let basis = Matrix::from_cols(&[vec![1, 0, 0], k[0].clone(), k[1].clone()]).unwrap();
        assert_eq!(basis.det().abs(), 1);
    }

    #[test]
    fn solve_and_kernel() {
        let a = m(&[&[1, 1, 0], &[0, 1, 1]]);
        let x = a.solve_rational(&[2, 3]).unwrap();
        let back: Vec<_> = (0..2)
            .map(|i| (0..3).fold(Q::from_integer(0), |acc, j| acc + Q::from_integer(a[(i, j)]) * x[j]))
            .collect();
        assert_eq!(back, vec![Q::from_integer(2), Q::from_integer(3)]);
        assert_eq!(a.rational_kernel(), vec![vec![1, -1, 1]]);
        assert!(m(&[&[1, 1], &[1, 1]]).solve_rational(&[1, 2]).is_none());
    }
}

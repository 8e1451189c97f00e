//! Small dense square matrices and a Gaussian elimination solver.
//!
//! The systems handled here have a handful of species, so everything is
//! stored densely in row-major order.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::{Error, Result};

/// Relative pivot threshold below which a matrix is treated as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from rows; every row must have as many entries as
    /// there are rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    /// Wraps row-major data of length `n * n`.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn fill(&mut self, value: f64) {
        self.data.iter_mut().for_each(|x| *x = value);
    }

    pub fn set_identity(&mut self) {
        self.fill(0.0);
        for i in 0..self.n {
            self[(i, i)] = 1.0;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn column_sum(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self[(i, j)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut inv = Self::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = solve_dense(self, &e)?;
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Ok(inv)
    }

    /// Eigenvalues of a 2×2 matrix with real spectrum, in ascending order.
    ///
    /// Returns a domain error for other sizes or a complex pair.
    pub fn eigenvalues_2x2(&self) -> Result<[f64; 2]> {
        if self.n != 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: self.n,
            });
        }
        let (a, b, c, d) = (self[(0, 0)], self[(0, 1)], self[(1, 0)], self[(1, 1)]);
        let half_tr = 0.5 * (a + d);
        // (a-d)^2/4 + bc avoids the cancellation in tr^2/4 - det.
        let disc = 0.25 * (a - d) * (a - d) + b * c;
        if disc < 0.0 {
            return Err(Error::Domain(alloc::format!(
                "complex eigenvalues (discriminant {disc:e})"
            )));
        }
        let r = libm::sqrt(disc);
        // Larger-magnitude root first, the other via det / root.
        let big = if half_tr >= 0.0 {
            half_tr + r
        } else {
            half_tr - r
        };
        let det = a * d - b * c;
        let small = if big != 0.0 { det / big } else { 0.0 };
        Ok(if big <= small {
            [big, small]
        } else {
            [small, big]
        })
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, rhs.n);
        DenseMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, rhs.n);
        DenseMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
pub fn solve_dense(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let mut work = m.clone();
    let mut x = rhs.to_vec();
    solve_in_place(&mut work, &mut x)?;
    Ok(x)
}

/// In-place variant of [`solve_dense`]: `m` is destroyed and `x` holds the
/// right-hand side on entry and the solution on exit.
pub fn solve_in_place(m: &mut DenseMatrix, x: &mut [f64]) -> Result<()> {
    let n = m.n;
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    let scale = m.max_abs();
    let tiny = SINGULAR_PIVOT_RATIO * scale;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[(col, col)].abs();
        for r in col + 1..n {
            let v = m[(r, col)].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > tiny) || scale == 0.0 {
            return Err(Error::Singular {
                column: col,
                pivot: best,
            });
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        let p = m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] / p;
            if f == 0.0 {
                continue;
            }
            m[(r, col)] = 0.0;
            for j in col + 1..n {
                let v = m[(col, j)];
                m[(r, j)] -= f * v;
            }
            x[r] -= f * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Ok(())
}

/// Solver for matrices with nonpositive off-diagonals whose columns each sum
/// to exactly one, the shape of every matrix assembled for a conservative
/// system. Only the off-diagonals of `m` are read; each diagonal entry of the
/// reduced matrices is rebuilt from its column's excess over the remaining
/// off-diagonals, so no step subtracts quantities of like sign. The pivots
/// are the diagonal ones partial pivoting selects for column diagonally
/// dominant matrices.
///
/// `m` is destroyed and `x` holds the right-hand side on entry and the
/// solution on exit.
pub fn solve_unit_column_sum_in_place(m: &mut DenseMatrix, x: &mut [f64]) -> Result<()> {
    let n = m.n;
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    // The diagonal slots carry the column excess until they become pivots.
    for k in 0..n {
        m[(k, k)] = 1.0;
    }
    for k in 0..n {
        let excess = m[(k, k)];
        let mut pivot = excess;
        for i in k + 1..n {
            pivot -= m[(i, k)];
        }
        if !(pivot > 0.0 && pivot.is_finite()) {
            return Err(Error::Singular { column: k, pivot });
        }
        m[(k, k)] = pivot;
        let ck = excess / pivot;
        for j in k + 1..n {
            let v = m[(k, j)];
            m[(j, j)] -= v * ck;
        }
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k + 1..n {
                if j != i {
                    let v = m[(k, j)];
                    m[(i, j)] -= f * v;
                }
            }
            x[i] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_column_sum(off: &[[f64; 3]; 3]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(3);
        for j in 0..3 {
            let mut s = 0.0;
            for i in (0..3).filter(|&i| i != j) {
                m[(i, j)] = -off[i][j];
                s += off[i][j];
            }
            m[(j, j)] = 1.0 + s;
        }
        m
    }

    #[test]
    fn unit_column_sum_solver_agrees_with_pivoting() {
        let m = unit_column_sum(&[[0.0, 2.0, 0.5], [3.0, 0.0, 7.0], [0.25, 1.0, 0.0]]);
        let rhs = [0.2, 0.3, 0.5];
        let expected = solve_dense(&m, &rhs).unwrap();
        let mut work = m.clone();
        let mut x = rhs;
        solve_unit_column_sum_in_place(&mut work, &mut x).unwrap();
        for (a, b) in x.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_column_sum_solver_conserves_with_huge_entries() {
        let m = unit_column_sum(&[[0.0, 3e9, 1e-3], [7e8, 0.0, 5e9], [2e-2, 4e6, 0.0]]);
        let rhs = [0.6, 0.3, 0.1];
        let mut work = m.clone();
        let mut x = rhs;
        solve_unit_column_sum_in_place(&mut work, &mut x).unwrap();
        assert!(x.iter().all(|&v| v > 0.0));
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let x = solve_dense(&DenseMatrix::identity(3), &[1.5, -2.0, 7.0]).unwrap();
        assert_eq!(x, vec![1.5, -2.0, 7.0]);
    }

    #[test]
    fn two_by_two_matches_cramer() {
        let m = DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap();
        let x = solve_dense(&m, &[0.9, 0.1]).unwrap();
        assert!((x[0] - 19.0 / 30.0).abs() < 1e-15);
        assert!((x[1] - 11.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn rank_deficient_is_singular() {
        let m = DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(
            solve_dense(&m, &[1.0, 2.0]),
            Err(Error::Singular { .. })
        ));
        assert!(matches!(
            solve_dense(&DenseMatrix::zeros(2), &[1.0, 2.0]),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m =
            DenseMatrix::from_rows(&[[0.0, 1.0, 2.0], [3.0, 0.0, 1.0], [1.0, 1.0, 0.0]]).unwrap();
        let rhs = [5.0, 6.0, 3.0];
        let x = solve_dense(&m, &rhs).unwrap();
        let r = m.mul_vec(&x);
        for (a, b) in r.iter().zip(&rhs) {
            assert!((a - b).abs() <= 1e-10 * 6.0);
        }
    }

    #[test]
    fn non_square_rows_rejected() {
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).is_err());
    }

    #[test]
    fn eigenvalues_of_symmetric_rate_matrix() {
        let m = DenseMatrix::from_rows(&[[-1.0, 1.0], [1.0, -1.0]]).unwrap();
        let ev = m.eigenvalues_2x2().unwrap();
        assert!((ev[0] + 2.0).abs() < 1e-15 && ev[1].abs() < 1e-15);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = DenseMatrix::from_rows(&[[4.0, -1.0], [-3.0, 2.0]]).unwrap();
        let p = &m * &m.inverse().unwrap();
        assert!(p.max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
    }
}

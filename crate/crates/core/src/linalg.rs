//! Dense matrices and an LU factorization with partial pivoting.
//!
//! The model Jacobians are banded once unknowns are ordered cell by cell, so the elimination
//! skips zero multipliers and stops each row update at the pivot row's last nonzero column.

use crate::error::{Error, Result};
use crate::scalar::{norm, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension { expected: cols, actual: row.len() });
            }
            m.data[i * cols..(i + 1) * cols].copy_from_slice(row);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|v| *v = T::zero());
    }

    pub fn add(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.cols + col] = self.data[row * self.cols + col] + value;
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [T] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "matrix-vector dimension");
        (0..self.rows).map(|i| self.row(i).iter().zip(x.iter()).fold(T::zero(), |acc, (&a, &b)| acc + a * b)).collect()
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// `P A = L U`, stored in place with unit lower diagonal.
#[derive(Debug, Clone)]
pub struct LuFactorization<T> {
    lu: DenseMatrix<T>,
    permutation: Vec<usize>,
}

impl<T: Real> LuFactorization<T> {
    pub fn new(matrix: DenseMatrix<T>) -> Result<Self> {
        let n = matrix.rows;
        if matrix.cols != n {
            return Err(Error::Dimension { expected: n, actual: matrix.cols });
        }
        let mut lu = matrix;
        let mut permutation: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_abs = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > pivot_abs {
                    pivot_abs = v;
                    pivot_row = i;
                }
            }
            if !(pivot_abs > T::zero()) || !pivot_abs.is_finite() {
                return Err(Error::Singular { column: k });
            }
            if pivot_row != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, pivot_row * n + j);
                }
                permutation.swap(k, pivot_row);
            }
            let pivot = lu[(k, k)];
            let last = (k..n).rev().find(|&j| lu[(k, j)] != T::zero()).unwrap_or(k);
            let (upper, lower) = lu.data.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n..k * n + n];
            for row in lower.chunks_exact_mut(n) {
                if row[k] == T::zero() {
                    continue;
                }
                let factor = row[k] / pivot;
                row[k] = factor;
                for j in k + 1..=last {
                    row[j] = row[j] - factor * pivot_row[j];
                }
            }
        }
        Ok(Self { lu, permutation })
    }

    pub fn dimension(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.lu.rows;
        if rhs.len() != n {
            return Err(Error::Dimension { expected: n, actual: rhs.len() });
        }
        let mut x: Vec<T> = self.permutation.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - row[j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for j in i + 1..n {
                acc = acc - row[j] * x[j];
            }
            x[i] = acc / row[i];
        }
        Ok(x)
    }
}

/// Solves `J p = rhs` by a direct factorization.
pub fn linear_solve<T: Real>(jacobian: &DenseMatrix<T>, rhs: &[T]) -> Result<Vec<T>> {
    LuFactorization::new(jacobian.clone())?.solve(rhs)
}

/// Cholesky test for symmetric positive definiteness.
pub fn is_positive_definite<T: Real>(matrix: &DenseMatrix<T>) -> bool {
    let n = matrix.rows;
    if matrix.cols != n {
        return false;
    }
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = matrix[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut v = matrix[(i, j)];
            for k in 0..j {
                v = v - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    true
}

/// `‖J p − rhs‖ / ‖rhs‖` (or the absolute residual when `rhs = 0`).
pub fn relative_residual<T: Real>(jacobian: &DenseMatrix<T>, p: &[T], rhs: &[T]) -> T {
    let jp = jacobian.mul_vec(p);
    let diff: Vec<T> = jp.iter().zip(rhs.iter()).map(|(&a, &b)| a - b).collect();
    let scale = norm(rhs);
    if scale > T::zero() {
        norm(&diff) / scale
    } else {
        norm(&diff)
    }
}

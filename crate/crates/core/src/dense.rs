//! Dense matrices with an LU direct solver.
//!
//! Used for the desk-scale saddle-point reference solve, Hermite operator
//! storage, and small boundary-block systems; not intended for large n.

use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error, PartialEq)]
pub enum DenseError {
    #[error("matrix is singular at elimination step {step}")]
    Singular { step: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![T::zero(); n_rows * n_cols],
        }
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| {
                let row = &self.data[i * self.n_cols..(i + 1) * self.n_cols];
                row.iter().zip(x).fold(T::zero(), |a, (&m, &v)| a + m * v)
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n_rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[T]) {
        assert_eq!(col.len(), self.n_rows);
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    /// LU factorization with partial pivoting; consumes the matrix.
    pub fn factor_lu(self) -> Result<LuFactor<T>, DenseError> {
        assert_eq!(self.n_rows, self.n_cols, "LU requires a square matrix");
        let n = self.n_rows;
        let mut a = self.data;
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in (k + 1)..n {
                let cand = a[i * n + k].abs();
                if cand > best {
                    best = cand;
                    p = i;
                }
            }
            if best == T::zero() {
                return Err(DenseError::Singular { step: k });
            }
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                a[i * n + k] = factor;
                if factor != T::zero() {
                    for j in (k + 1)..n {
                        let akj = a[k * n + j];
                        a[i * n + j] -= factor * akj;
                    }
                }
            }
        }
        Ok(LuFactor { n, lu: a, pivots })
    }

    /// One-shot solve; factor with [`DenseMatrix::factor_lu`] to reuse.
    pub fn solve(self, b: &[T]) -> Result<Vec<T>, DenseError> {
        let f = self.factor_lu()?;
        f.solve(b)
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n_cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n_cols + j]
    }
}

/// LU factors with the pivot sequence, reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct LuFactor<T> {
    n: usize,
    lu: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Real> LuFactor<T> {
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, DenseError> {
        if b.len() != self.n {
            return Err(DenseError::Dimension {
                expected: self.n,
                got: b.len(),
            });
        }
        let n = self.n;
        let mut x = b.to_vec();
        // The stored multipliers are in final row order: apply the full
        // interchange sequence before substitution.
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        for k in 0..n {
            let xk = x[k];
            if xk != T::zero() {
                for i in (k + 1)..n {
                    let l = self.lu[i * n + k];
                    x[i] -= l * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in (k + 1)..n {
                acc -= self.lu[k * n + j] * x[j];
            }
            x[k] = acc / self.lu[k * n + k];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = DenseMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => 2.0,
            (0, 1) => 1.0,
            (1, 0) => 1.0,
            (1, 1) => 3.0,
            (1, 2) => 1.0,
            (2, 1) => 1.0,
            (2, 2) => 4.0,
            _ => 0.0,
        });
        let x_true = vec![1.0f64, -2.0, 3.0];
        let b = a.mul_vec(&x_true);
        let x = a.solve(&b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = DenseMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => 1.0,
            (1, 0) => 1.0,
            _ => 0.0,
        });
        let x = a.solve(&[3.0, 5.0]).unwrap();
        assert_eq!(x, vec![5.0, 3.0]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = DenseMatrix::from_fn(2, 2, |_, _| 1.0f64);
        assert!(matches!(
            a.solve(&[1.0, 1.0]),
            Err(DenseError::Singular { .. })
        ));
    }

    #[test]
    fn factor_reuse_across_rhs() {
        let a = DenseMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                4.0
            } else {
                1.0 / (1.0 + (i as f64 - j as f64).abs())
            }
        });
        let f = a.clone().factor_lu().unwrap();
        for seed in 0..3 {
            let x_true: Vec<f64> = (0..4).map(|i| (i + seed) as f64 - 1.5).collect();
            let b = a.mul_vec(&x_true);
            let x = f.solve(&b).unwrap();
            for (xi, ti) in x.iter().zip(&x_true) {
                assert!((xi - ti).abs() < 1e-12);
            }
        }
    }
}

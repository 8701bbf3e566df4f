//! Sparse LDL^T factorization for symmetric positive definite systems.
//!
//! Up-looking factorization driven by the elimination tree, with a reverse
//! Cuthill-McKee fill-reducing ordering. No pivoting: a non-positive pivot is
//! reported as an error, which for the operators assembled here signals a
//! mis-assembled (non-SPD) system rather than a borderline numerical case.

use thiserror::Error;

use crate::num::Real;
use crate::sparse::SparseMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum LdltError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error(
        "non-positive pivot {value} at elimination step {step}; matrix is not positive definite"
    )]
    NonPositivePivot { step: usize, value: f64 },
}

/// LDL^T factors of `P*A*P^T` together with the permutation `P`.
#[derive(Clone, Debug)]
pub struct LdltFactor<T> {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    l_values: Vec<T>,
    diag: Vec<T>,
}

impl<T: Real> LdltFactor<T> {
    /// Factors a symmetric positive definite matrix (full pattern stored).
    pub fn new(matrix: &SparseMatrix<T>) -> Result<Self, LdltError> {
        Self::with_ordering(matrix, &reverse_cuthill_mckee(matrix))
    }

    /// Factors with a caller-supplied ordering (`perm[new] = old`).
    pub fn with_ordering(matrix: &SparseMatrix<T>, perm: &[usize]) -> Result<Self, LdltError> {
        if matrix.n_rows() != matrix.n_cols() {
            return Err(LdltError::NotSquare {
                rows: matrix.n_rows(),
                cols: matrix.n_cols(),
            });
        }
        let n = matrix.n_rows();
        let a = matrix.permute_sym(perm);

        // Symbolic pass: elimination tree and column counts.
        let mut parent = vec![usize::MAX; n];
        let mut flag = vec![usize::MAX; n];
        let mut col_counts = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for (j, _) in a.row(k) {
                if j >= k {
                    break;
                }
                let mut i = j;
                while flag[i] != k {
                    if parent[i] == usize::MAX {
                        parent[i] = k;
                    }
                    col_counts[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        for k in 0..n {
            col_ptr[k + 1] = col_ptr[k] + col_counts[k];
        }
        let nnz = col_ptr[n];

        // Numeric pass.
        let mut row_idx = vec![0usize; nnz];
        let mut l_values = vec![T::zero(); nnz];
        let mut diag = vec![T::zero(); n];
        let mut fill = vec![0usize; n]; // entries currently in column i of L
        let mut y = vec![T::zero(); n];
        let mut pattern = vec![0usize; n];
        for item in flag.iter_mut() {
            *item = usize::MAX;
        }
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            for (j, v) in a.row(k) {
                if j > k {
                    break;
                }
                y[j] += v;
                if j == k {
                    continue;
                }
                let mut len = 0usize;
                let mut i = j;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    pattern[top] = pattern[len];
                }
            }
            diag[k] = y[k];
            y[k] = T::zero();
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = T::zero();
                let lo = col_ptr[i];
                let hi = lo + fill[i];
                for p in lo..hi {
                    y[row_idx[p]] -= l_values[p] * yi;
                }
                let l_ki = yi / diag[i];
                diag[k] -= l_ki * yi;
                row_idx[hi] = k;
                l_values[hi] = l_ki;
                fill[i] += 1;
            }
            if diag[k] <= T::zero() || !diag[k].is_finite() {
                return Err(LdltError::NonPositivePivot {
                    step: k,
                    value: diag[k].to_f64(),
                });
            }
        }

        Ok(Self {
            n,
            perm: perm.to_vec(),
            col_ptr,
            row_idx,
            l_values,
            diag,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of off-diagonal nonzeros in the factor.
    pub fn nnz_l(&self) -> usize {
        self.row_idx.len()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n, "rhs length mismatch");
        let mut x: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..self.n {
            let xj = x[j];
            if xj != T::zero() {
                for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                    x[self.row_idx[p]] -= self.l_values[p] * xj;
                }
            }
            x[j] = xj / self.diag[j];
        }
        for j in (0..self.n).rev() {
            let mut acc = x[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc -= self.l_values[p] * x[self.row_idx[p]];
            }
            x[j] = acc;
        }
        let mut out = vec![T::zero(); self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}

/// Reverse Cuthill-McKee ordering (`perm[new] = old`), deterministic.
pub fn reverse_cuthill_mckee<T: Real>(matrix: &SparseMatrix<T>) -> Vec<usize> {
    let n = matrix.n_rows();
    let degree: Vec<usize> = (0..n)
        .map(|i| matrix.row(i).filter(|&(j, _)| j != i).count())
        .collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut neighbors: Vec<usize> = Vec::new();

    while order.len() < n {
        // Deterministic component start: unvisited vertex of minimum degree.
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        let root = pseudo_peripheral(matrix, start, &degree);
        let head = order.len();
        visited[root] = true;
        order.push(root);
        let mut cursor = head;
        while cursor < order.len() {
            let v = order[cursor];
            cursor += 1;
            neighbors.clear();
            neighbors.extend(
                matrix
                    .row(v)
                    .map(|(j, _)| j)
                    .filter(|&j| !visited[j] && j != v),
            );
            neighbors.sort_by_key(|&j| (degree[j], j));
            for &j in &neighbors {
                if !visited[j] {
                    visited[j] = true;
                    order.push(j);
                }
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral<T: Real>(matrix: &SparseMatrix<T>, start: usize, degree: &[usize]) -> usize {
    let n = matrix.n_rows();
    let mut root = start;
    let mut last_ecc = 0usize;
    let mut level = vec![usize::MAX; n];
    for _ in 0..8 {
        for item in level.iter_mut() {
            *item = usize::MAX;
        }
        level[root] = 0;
        let mut frontier = vec![root];
        let mut ecc = 0;
        let mut last_level: Vec<usize> = vec![root];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &v in &frontier {
                for (j, _) in matrix.row(v) {
                    if j != v && level[j] == usize::MAX {
                        level[j] = level[v] + 1;
                        ecc = ecc.max(level[j]);
                        next.push(j);
                    }
                }
            }
            if !next.is_empty() {
                last_level = next.clone();
            }
            frontier = next;
        }
        let candidate = *last_level
            .iter()
            .min_by_key(|&&v| (degree[v], v))
            .unwrap_or(&root);
        if ecc <= last_ecc {
            break;
        }
        last_ecc = ecc;
        root = candidate;
    }
    root
}

//! Compressed sparse row matrices.
//!
//! All FEM operators assembled in this crate (stiffness, mass, boundary mass
//! and their composites) are symmetric; the storage is a general CSR matrix
//! and symmetry is a property of the assembly, not of the format.

use crate::num::Real;

/// Triplet accumulator; duplicate entries are summed on build.
#[derive(Clone, Debug)]
pub struct TripletBuilder<T> {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> TripletBuilder<T> {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries.push((row, col, value));
    }

    pub fn build(mut self) -> SparseMatrix<T> {
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_counts = vec![0usize; self.n_rows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(self.entries.len());
        let mut values: Vec<T> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_counts[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n_rows {
            row_counts[i + 1] += row_counts[i];
        }
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: row_counts,
            col_idx,
            values,
        }
    }
}

/// CSR sparse matrix with sorted, unique column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Sorted `(column, value)` pairs of one row.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        self.col_idx[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&c, &v)| (c, v))
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&col) {
            Ok(k) => self.values[lo + k],
            Err(_) => T::zero(),
        }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n_cols, "matvec dimension mismatch");
        let mut out = vec![T::zero(); self.n_rows];
        for i in 0..self.n_rows {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            out[i] = acc;
        }
        out
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n_rows.min(self.n_cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.n_rows)
            .map(|i| self.row(i).fold(T::zero(), |a, (_, v)| a + v))
            .collect()
    }

    /// Left-multiplies by a diagonal matrix: `diag(d) * self`.
    #[allow(clippy::needless_range_loop)]
    pub fn scale_rows(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.n_rows);
        let mut out = self.clone();
        for i in 0..self.n_rows {
            for k in out.row_ptr[i]..out.row_ptr[i + 1] {
                out.values[k] *= d[i];
            }
        }
        out
    }

    /// Sparse-sparse product with a dense accumulator per row.
    pub fn mul_mat(&self, other: &Self) -> Self {
        assert_eq!(self.n_cols, other.n_rows, "spgemm dimension mismatch");
        let n_cols = other.n_cols;
        let mut marker = vec![usize::MAX; n_cols];
        let mut acc = vec![T::zero(); n_cols];
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut cols_in_row: Vec<usize> = Vec::new();
        for i in 0..self.n_rows {
            cols_in_row.clear();
            for ka in self.row_ptr[i]..self.row_ptr[i + 1] {
                let k = self.col_idx[ka];
                let a = self.values[ka];
                for kb in other.row_ptr[k]..other.row_ptr[k + 1] {
                    let j = other.col_idx[kb];
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = T::zero();
                        cols_in_row.push(j);
                    }
                    acc[j] += a * other.values[kb];
                }
            }
            cols_in_row.sort_unstable();
            for &j in &cols_in_row {
                col_idx.push(j);
                values.push(acc[j]);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows: self.n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Extracts the submatrix at the given rows and columns, relabeled to
    /// their positions in the index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for &old_row in rows {
            for (c, v) in self.row(old_row) {
                if col_map[c] != usize::MAX {
                    col_idx.push(col_map[c]);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows: rows.len(),
            n_cols: cols.len(),
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Symmetric permutation `P * self * P^T` where `perm[new] = old`.
    pub fn permute_sym(&self, perm: &[usize]) -> Self {
        assert_eq!(self.n_rows, self.n_cols);
        assert_eq!(perm.len(), self.n_rows);
        let mut iperm = vec![0usize; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let mut builder = TripletBuilder::new(self.n_rows, self.n_cols);
        for old_row in 0..self.n_rows {
            for (old_col, v) in self.row(old_row) {
                builder.push(iperm[old_row], iperm[old_col], v);
            }
        }
        builder.build()
    }

    pub fn to_dense(&self) -> crate::dense::DenseMatrix<T> {
        let mut out = crate::dense::DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                out[(i, j)] = v;
            }
        }
        out
    }

    /// Maximum absolute asymmetry `|A - A^T|`; zero for exactly symmetric matrices.
    pub fn asymmetry(&self) -> T {
        assert_eq!(self.n_rows, self.n_cols);
        let mut worst = T::zero();
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Rows as `(row, col, value)` triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn identity(n: usize) -> Self {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, T::one());
        }
        b.build()
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        let mut b = TripletBuilder::new(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            b.push(i, i, v);
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SparseMatrix<f64> {
        let mut b = TripletBuilder::new(3, 3);
        b.push(0, 0, 2.0);
        b.push(0, 2, 1.0);
        b.push(1, 1, 3.0);
        b.push(2, 0, 1.0);
        b.push(2, 2, 4.0);
        b.push(2, 2, 0.5); // duplicate, summed
        b.build()
    }

    #[test]
    fn build_sums_duplicates_and_sorts() {
        let m = sample();
        assert_eq!(m.nnz(), 5);
        assert_eq!(m.get(2, 2), 4.5);
        assert_eq!(m.get(1, 0), 0.0);
        let rows: Vec<_> = m.row(0).collect();
        assert_eq!(rows, vec![(0, 2.0), (2, 1.0)]);
    }

    #[test]
    fn matvec_matches_dense() {
        let m = sample();
        let x = vec![1.0, 2.0, 3.0];
        let y = m.mul_vec(&x);
        assert_eq!(y, vec![5.0, 6.0, 14.5]);
    }

    #[test]
    fn empty_rows_are_handled() {
        let mut b = TripletBuilder::<f64>::new(4, 4);
        b.push(0, 1, 1.0);
        b.push(3, 2, 2.0);
        let m = b.build();
        assert_eq!(m.row(1).count(), 0);
        assert_eq!(m.row(2).count(), 0);
        assert_eq!(m.get(3, 2), 2.0);
    }

    #[test]
    fn spgemm_matches_dense_product() {
        let a = sample();
        let b = sample();
        let c = a.mul_mat(&b);
        let ad = a.to_dense();
        let bd = b.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += ad[(i, k)] * bd[(k, j)];
                }
                assert!((c.get(i, j) - acc).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn submatrix_relabels() {
        let m = sample();
        let s = m.submatrix(&[0, 2], &[0, 2]);
        assert_eq!(s.n_rows(), 2);
        assert_eq!(s.get(0, 1), 1.0);
        assert_eq!(s.get(1, 1), 4.5);
    }

    #[test]
    fn permute_sym_round_trip() {
        let m = sample();
        let perm = vec![2, 0, 1];
        let p = m.permute_sym(&perm);
        for new_r in 0..3 {
            for new_c in 0..3 {
                assert_eq!(p.get(new_r, new_c), m.get(perm[new_r], perm[new_c]));
            }
        }
    }
}

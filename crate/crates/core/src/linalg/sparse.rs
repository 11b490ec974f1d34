//! Compressed sparse row storage and the sparse kernels built on it.

use crate::error::{check_dim, Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Real sparse matrix in compressed sparse row layout.
///
/// Column indices are strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    /// Builds a matrix from raw CSR arrays, validating the layout.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        check_dim("row_offsets length", n_rows + 1, row_offsets.len())?;
        check_dim("values length", col_indices.len(), values.len())?;
        if row_offsets[0] != 0 || row_offsets[n_rows] != col_indices.len() {
            return Err(Error::InvalidStructure(
                "row_offsets must start at 0 and end at nnz".into(),
            ));
        }
        for i in 0..n_rows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::InvalidStructure(format!(
                    "row_offsets decrease at row {i}"
                )));
            }
            let cols = &col_indices[lo..hi];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "column indices not strictly increasing in row {i}"
                )));
            }
            if cols.last().is_some_and(|&c| c >= n_cols) {
                return Err(Error::InvalidStructure(format!(
                    "column index out of range in row {i}"
                )));
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = entries.iter().find(|&&(r, c, _)| r >= n_rows || c >= n_cols) {
            return Err(Error::InvalidStructure(format!(
                "triplet ({r}, {c}) outside {n_rows}x{n_cols}"
            )));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0; n_rows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values: Vec<T> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                let top = values.last_mut().expect("duplicate follows an entry");
                *top = *top + v;
                continue;
            }
            row_offsets[r + 1] += 1;
            col_indices.push(c);
            values.push(v);
            last = Some((r, c));
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense(dense: &DenseMatrix<T>) -> Self {
        let triplets = (0..dense.n_rows()).flat_map(|i| {
            (0..dense.n_cols()).filter_map(move |j| {
                let v = dense.get(i, j);
                (v != T::zero()).then_some((i, j, v))
            })
        });
        Self::from_triplets(dense.n_rows(), dense.n_cols(), triplets)
            .expect("dense indices are in range")
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[span.clone()], &self.values[span])
    }

    /// Stored entry `(i, j)`, or zero when it is outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(T::zero(), |p| vals[p])
    }

    /// `y = A x`, accumulated in row order.
    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n_cols, "spmv: x length");
        assert_eq!(y.len(), self.n_rows, "spmv: y length");
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols
                .iter()
                .zip(vals)
                .fold(T::zero(), |acc, (&c, &v)| acc + v * x[c]);
        }
    }

    /// Checked sparse matrix-vector product.
    pub fn spmv(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim("spmv operand", self.n_cols, x.len())?;
        let mut y = vec![T::zero(); self.n_rows];
        self.mul_vec_into(x, &mut y);
        Ok(y)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let row_offsets = counts.clone();
        let mut next = counts;
        let mut col_indices = vec![0; self.nnz()];
        let mut values = vec![T::zero(); self.nnz()];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let dst = next[c];
                col_indices[dst] = i;
                values[dst] = v;
                next[c] += 1;
            }
        }
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Sparse product `self * rhs` (Gustavson), symbolic pass then numeric pass.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_dim("sparse product inner dimension", self.n_cols, rhs.n_rows)?;
        let n = rhs.n_cols;

        // symbolic
        let mut marker = vec![usize::MAX; n];
        let mut row_offsets = vec![0usize; self.n_rows + 1];
        for i in 0..self.n_rows {
            let mut count = 0;
            for &k in self.row(i).0 {
                for &j in rhs.row(k).0 {
                    if marker[j] != i {
                        marker[j] = i;
                        count += 1;
                    }
                }
            }
            row_offsets[i + 1] = row_offsets[i] + count;
        }

        // numeric
        let nnz = row_offsets[self.n_rows];
        let mut col_indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        let mut acc = vec![T::zero(); n];
        marker.fill(usize::MAX);
        let mut touched = Vec::new();
        for i in 0..self.n_rows {
            touched.clear();
            let (a_cols, a_vals) = self.row(i);
            for (&k, &a) in a_cols.iter().zip(a_vals) {
                let (b_cols, b_vals) = rhs.row(k);
                for (&j, &b) in b_cols.iter().zip(b_vals) {
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = T::zero();
                        touched.push(j);
                    }
                    acc[j] = acc[j] + a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                col_indices.push(j);
                values.push(acc[j]);
            }
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: n,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Kronecker product `self ⊗ rhs`.
    ///
    /// Row `(i, p)` maps to `i * rhs.n_rows + p`, so the right factor runs fastest.
    pub fn kron(&self, rhs: &Self) -> Self {
        let n_rows = self.n_rows * rhs.n_rows;
        let n_cols = self.n_cols * rhs.n_cols;
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::with_capacity(self.nnz() * rhs.nnz());
        let mut values = Vec::with_capacity(self.nnz() * rhs.nnz());
        row_offsets.push(0);
        for i in 0..self.n_rows {
            let (a_cols, a_vals) = self.row(i);
            for p in 0..rhs.n_rows {
                let (b_cols, b_vals) = rhs.row(p);
                for (&j, &a) in a_cols.iter().zip(a_vals) {
                    for (&q, &b) in b_cols.iter().zip(b_vals) {
                        col_indices.push(j * rhs.n_cols + q);
                        values.push(a * b);
                    }
                }
                row_offsets.push(col_indices.len());
            }
        }
        Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Principal submatrix on the (sorted or unsorted) global index list `indices`.
    ///
    /// Local index `a` corresponds to global index `indices[a]`.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let mut local_of = vec![usize::MAX; self.n_cols];
        for (a, &g) in indices.iter().enumerate() {
            local_of[g] = a;
        }
        let mut row_offsets = Vec::with_capacity(indices.len() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        let mut row_buf: Vec<(usize, T)> = Vec::new();
        for &g in indices {
            row_buf.clear();
            let (cols, vals) = self.row(g);
            for (&c, &v) in cols.iter().zip(vals) {
                let local = local_of[c];
                if local != usize::MAX {
                    row_buf.push((local, v));
                }
            }
            row_buf.sort_unstable_by_key(|&(c, _)| c);
            for &(c, v) in &row_buf {
                col_indices.push(c);
                values.push(v);
            }
            row_offsets.push(col_indices.len());
        }
        Self {
            n_rows: indices.len(),
            n_cols: indices.len(),
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Lower and upper half-bandwidths of the stored pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for i in 0..self.n_rows {
            let cols = self.row(i).0;
            if let (Some(&first), Some(&last)) = (cols.first(), cols.last()) {
                lower = lower.max(i.saturating_sub(first));
                upper = upper.max(last.saturating_sub(i));
            }
        }
        (lower, upper)
    }

    /// True when every stored entry has an equal mirror entry.
    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut dense = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                dense.set(i, c, v);
            }
        }
        dense
    }

    pub fn scaled(&self, alpha: T) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = *v * alpha);
        out
    }
}

/// Galerkin triple product `Zt * A * Z` with `Zt` supplied explicitly.
pub fn sparse_triple_product<T: Scalar>(
    zt: &CsrMatrix<T>,
    a: &CsrMatrix<T>,
    z: &CsrMatrix<T>,
) -> Result<CsrMatrix<T>> {
    check_dim("triple product: A columns vs Z rows", a.n_cols(), z.n_rows())?;
    zt.matmul(a)?.matmul(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix<f64> {
        CsrMatrix::from_triplets(
            3,
            4,
            [(0, 0, 1.0), (0, 3, 2.0), (1, 1, 3.0), (2, 0, 4.0), (2, 2, 5.0)],
        )
        .unwrap()
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = CsrMatrix::from_triplets(2, 2, [(1, 1, 1.0), (0, 1, 2.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(m.row_offsets(), &[0, 1, 2]);
        assert_eq!(m.get(1, 1), 4.0);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn rejects_unsorted_columns() {
        let err = CsrMatrix::<f64>::new(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]);
        assert!(matches!(err, Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn identity_spmv_returns_input() {
        let x = [1.5, -2.0, 3.25];
        assert_eq!(CsrMatrix::identity(3).spmv(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn zero_matrix_spmv_is_zero() {
        let x = [1.0, 2.0];
        assert_eq!(CsrMatrix::<f64>::zeros(3, 2).spmv(&x).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        assert!(matches!(
            sample().spmv(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn transpose_twice_is_identity() {
        let m = sample();
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.transpose().get(3, 0), 2.0);
    }

    #[test]
    fn identity_triple_product_returns_matrix() {
        let a = CsrMatrix::from_triplets(3, 3, [(0, 0, 2.0), (0, 2, -1.0), (2, 0, -1.0), (1, 1, 7.0)])
            .unwrap();
        let i = CsrMatrix::identity(3);
        assert_eq!(sparse_triple_product(&i, &a, &i).unwrap(), a);
    }

    #[test]
    fn kron_small() {
        let a = CsrMatrix::from_triplets(2, 1, [(0, 0, 1.0), (1, 0, 2.0)]).unwrap();
        let b = CsrMatrix::from_triplets(2, 2, [(0, 0, 3.0), (1, 1, 4.0)]).unwrap();
        let k = a.kron(&b);
        assert_eq!((k.n_rows(), k.n_cols()), (4, 2));
        assert_eq!(k.get(0, 0), 3.0);
        assert_eq!(k.get(1, 1), 4.0);
        assert_eq!(k.get(2, 0), 6.0);
        assert_eq!(k.get(3, 1), 8.0);
    }

    #[test]
    fn bandwidths_of_pattern() {
        assert_eq!(sample().bandwidths(), (2, 3));
    }
}

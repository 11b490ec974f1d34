//! Zero fill-in incomplete LU factorisation.

use crate::error::{check_dim, Error, Result};
use crate::linalg::CsrMatrix;
use crate::scalar::Scalar;

/// `L` (unit diagonal, strictly lower part) and `U` stored together on the
/// sparsity pattern of the input matrix.
#[derive(Debug, Clone)]
pub struct Ilu0Factors<T> {
    lu: CsrMatrix<T>,
    diag: Vec<usize>,
}

impl<T: Scalar> Ilu0Factors<T> {
    /// IKJ variant in natural ordering, no pivoting.
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        check_dim("ILU(0): square matrix", a.n_rows(), a.n_cols())?;
        let n = a.n_rows();
        let mut lu = a.clone();
        let offsets = lu.row_offsets().to_vec();
        let cols = lu.col_indices().to_vec();

        let mut diag = vec![0usize; n];
        for i in 0..n {
            let row = &cols[offsets[i]..offsets[i + 1]];
            diag[i] = offsets[i]
                + row
                    .binary_search(&i)
                    .map_err(|_| Error::ZeroPivot { row: i })?;
        }

        let mut position = vec![usize::MAX; n];
        let vals = lu.values_mut();
        for i in 0..n {
            let span = offsets[i]..offsets[i + 1];
            for p in span.clone() {
                position[cols[p]] = p;
            }
            for p in offsets[i]..diag[i] {
                let k = cols[p];
                let pivot = vals[diag[k]];
                if pivot == T::zero() {
                    return Err(Error::ZeroPivot { row: k });
                }
                let factor = vals[p] / pivot;
                vals[p] = factor;
                for q in diag[k] + 1..offsets[k + 1] {
                    let slot = position[cols[q]];
                    if slot != usize::MAX {
                        vals[slot] = vals[slot] - factor * vals[q];
                    }
                }
            }
            if vals[diag[i]] == T::zero() || !vals[diag[i]].is_finite() {
                return Err(Error::ZeroPivot { row: i });
            }
            for p in span {
                position[cols[p]] = usize::MAX;
            }
        }
        Ok(Self { lu, diag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Combined factor storage: strictly lower part is `L`, the rest is `U`.
    pub fn combined(&self) -> &CsrMatrix<T> {
        &self.lu
    }

    /// `z = U⁻¹ L⁻¹ r`: forward then backward substitution.
    pub fn apply_into(&self, r: &[T], z: &mut [T]) {
        let n = self.dim();
        assert_eq!(r.len(), n, "ILU(0) apply: input length");
        assert_eq!(z.len(), n, "ILU(0) apply: output length");
        let offsets = self.lu.row_offsets();
        let cols = self.lu.col_indices();
        let vals = self.lu.values();
        for i in 0..n {
            let mut s = r[i];
            for p in offsets[i]..self.diag[i] {
                s = s - vals[p] * z[cols[p]];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for p in self.diag[i] + 1..offsets[i + 1] {
                s = s - vals[p] * z[cols[p]];
            }
            z[i] = s / vals[self.diag[i]];
        }
    }

    pub fn apply(&self, r: &[T]) -> Result<Vec<T>> {
        check_dim("ILU(0) apply", self.dim(), r.len())?;
        let mut z = vec![T::zero(); r.len()];
        self.apply_into(r, &mut z);
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense_lu_solve;

    fn tridiag(n: usize) -> CsrMatrix<f64> {
        CsrMatrix::from_triplets(
            n,
            n,
            (0..n).flat_map(|i| {
                let mut v = vec![(i, i, 2.0)];
                if i > 0 {
                    v.push((i, i - 1, -1.0));
                }
                if i + 1 < n {
                    v.push((i, i + 1, -1.0));
                }
                v
            }),
        )
        .unwrap()
    }

    #[test]
    fn tridiagonal_is_exact() {
        let a = tridiag(4);
        let f = Ilu0Factors::factor(&a).unwrap();
        let b = [1.0, -2.0, 0.5, 3.0];
        let z = f.apply(&b).unwrap();
        let exact = dense_lu_solve(&a.to_dense(), &b).unwrap();
        for (u, v) in z.iter().zip(&exact) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn lower_triangular_keeps_diagonal_u() {
        let a = CsrMatrix::from_triplets(
            3,
            3,
            [(0, 0, 2.0), (1, 0, 1.0), (1, 1, 4.0), (2, 1, -3.0), (2, 2, 5.0)],
        )
        .unwrap();
        let f = Ilu0Factors::factor(&a).unwrap();
        let lu = f.combined();
        assert_eq!(lu.get(0, 0), 2.0);
        assert_eq!(lu.get(1, 1), 4.0);
        assert_eq!(lu.get(2, 2), 5.0);
        assert_eq!(lu.get(1, 0), 0.5);
        assert_eq!(lu.get(2, 1), -0.75);
    }

    #[test]
    fn missing_diagonal_reports_row() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(
            Ilu0Factors::factor(&a),
            Err(Error::ZeroPivot { row: 1 })
        ));
    }

    #[test]
    fn zero_pivot_reports_row() {
        let a = CsrMatrix::from_triplets(
            2,
            2,
            [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)],
        )
        .unwrap();
        assert!(matches!(
            Ilu0Factors::factor(&a),
            Err(Error::ZeroPivot { row: 1 })
        ));
    }
}

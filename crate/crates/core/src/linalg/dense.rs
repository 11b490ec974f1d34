//! Small dense matrices, used as test oracles.

use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix. Intended for dimensions up to about a thousand.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            values: vec![T::zero(); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                values.push(f(i, j));
            }
        }
        Self {
            n_rows,
            n_cols,
            values,
        }
    }

    pub fn from_row_major(n_rows: usize, n_cols: usize, values: Vec<T>) -> Result<Self> {
        check_dim("dense values", n_rows * n_cols, values.len())?;
        Ok(Self {
            n_rows,
            n_cols,
            values,
        })
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
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.values[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let slot = &mut self.values[i * self.n_cols + j];
        *slot = *slot + v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i))
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim("dense mul_vec operand", self.n_cols, x.len())?;
        Ok((0..self.n_rows)
            .map(|i| {
                self.values[i * self.n_cols..(i + 1) * self.n_cols]
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_dim("dense matmul inner dimension", self.n_cols, rhs.n_rows)?;
        let mut out = Self::zeros(self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    out.add(i, j, a * rhs.get(k, j));
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Solves `A x = b` by LU with partial pivoting on a dense copy of `A`.
pub fn dense_lu_solve<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    check_dim("dense LU: square matrix", a.n_rows(), a.n_cols())?;
    check_dim("dense LU: right-hand side", a.n_rows(), b.len())?;
    let n = a.n_rows();
    let mut lu = a.values.clone();
    let mut x = b.to_vec();
    let threshold = T::epsilon() * a.max_abs() * T::lit(n.max(1) as f64);

    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&p, &q| {
                lu[p * n + k]
                    .abs()
                    .partial_cmp(&lu[q * n + k].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty pivot range");
        let pivot = lu[pivot_row * n + k];
        if pivot.abs() <= threshold || !pivot.is_finite() {
            return Err(Error::Singular { column: k });
        }
        if pivot_row != k {
            for j in 0..n {
                lu.swap(k * n + j, pivot_row * n + j);
            }
            x.swap(k, pivot_row);
        }
        for i in k + 1..n {
            let factor = lu[i * n + k] / pivot;
            if factor == T::zero() {
                continue;
            }
            for j in k + 1..n {
                lu[i * n + j] = lu[i * n + j] - factor * lu[k * n + j];
            }
            x[i] = x[i] - factor * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s = s - lu[k * n + j] * x[j];
        }
        x[k] = s / lu[k * n + k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve_returns_rhs() {
        let b = [3.0, -1.0, 2.5];
        let x = dense_lu_solve(&DenseMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b.to_vec());
    }

    #[test]
    fn hilbert_four_by_four() {
        let h = DenseMatrix::from_fn(4, 4, |i, j| 1.0 / (i + j + 1) as f64);
        let b = h.mul_vec(&[1.0; 4]).unwrap();
        let x = dense_lu_solve(&h, &b).unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-8, "{xi}");
        }
    }

    #[test]
    fn singular_detected() {
        let a = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            dense_lu_solve(&a, &[1.0, 1.0]),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = DenseMatrix::from_row_major(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(dense_lu_solve(&a, &[2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
    }
}

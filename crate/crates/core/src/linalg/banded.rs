//! Banded LU factorisation with partial pivoting.
//!
//! Row `i` of the band buffer stores columns `i - kl ..= i + ku + kl`; the
//! extra `kl` superdiagonals hold the fill that row interchanges introduce
//! into `U`. Multipliers for elimination step `k` stay in column `k` of the
//! rows they were computed for; later interchanges only touch columns
//! `>= k`, so the solve replays the interchanges step by step, as LAPACK's
//! `gbtrs` does.

use crate::error::{check_dim, Error, Result};
use crate::linalg::CsrMatrix;
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    n: usize,
    lower_bw: usize,
    upper_bw: usize,
    /// Multipliers of step `k` at `lower[k * kl .. k * kl + kl]`.
    lower: Vec<T>,
    /// Row `k` of `U` (columns `k ..= k + kl + ku`) at `upper[k * wu ..]`.
    upper: Vec<T>,
    /// Stored length of each `U` row past the diagonal, trimmed to its last nonzero.
    upper_len: Vec<usize>,
    pivots: Vec<usize>,
}

impl<T: Scalar> BandedLu<T> {
    /// Factorises a square sparse matrix; bandwidths come from its pattern.
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        check_dim("banded LU: square matrix", a.n_rows(), a.n_cols())?;
        let n = a.n_rows();
        let (kl, ku) = a.bandwidths();
        let width = 2 * kl + ku + 1;
        let mut band = vec![T::zero(); n * width];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                band[i * width + c + kl - i] = v;
            }
        }
        let pivots = eliminate(&mut band, n, kl, ku)?;

        let wu = kl + ku + 1;
        let mut lower = vec![T::zero(); n * kl];
        let mut upper = vec![T::zero(); n * wu];
        let mut upper_len = vec![0; n];
        for k in 0..n {
            let row = &band[k * width + kl..(k + 1) * width];
            upper[k * wu..(k + 1) * wu].copy_from_slice(row);
            upper_len[k] = row[1..]
                .iter()
                .rposition(|&v| v != T::zero())
                .map_or(0, |p| p + 1)
                .min(n - 1 - k);
            for i in k + 1..=(k + kl).min(n - 1) {
                lower[k * kl + i - k - 1] = band[i * width + k + kl - i];
            }
        }
        Ok(Self {
            n,
            lower_bw: kl,
            upper_bw: ku,
            lower,
            upper,
            upper_len,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.lower_bw, self.upper_bw)
    }

    /// Solves in place: `x` holds the right-hand side on entry.
    pub fn solve_in_place(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.n, "banded solve: rhs length");
        let (n, kl) = (self.n, self.lower_bw);
        let wu = kl + self.upper_bw + 1;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk == T::zero() {
                continue;
            }
            let len = kl.min(n - 1 - k);
            let mult = &self.lower[k * kl..k * kl + len];
            for (xi, &l) in x[k + 1..k + 1 + len].iter_mut().zip(mult) {
                *xi = *xi - l * xk;
            }
        }
        for k in (0..n).rev() {
            let len = self.upper_len[k];
            let row = &self.upper[k * wu..k * wu + 1 + len];
            let s = x[k] - dot(&row[1..], &x[k + 1..k + 1 + len]);
            x[k] = s / row[0];
        }
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        check_dim("banded solve: rhs length", self.n, b.len())?;
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }
}

/// Gaussian elimination with partial pivoting on the row-band buffer.
///
/// Row `i` of `band` stores columns `i - kl ..= i + ku + kl`.
fn eliminate<T: Scalar>(band: &mut [T], n: usize, kl: usize, ku: usize) -> Result<Vec<usize>> {
    let width = 2 * kl + ku + 1;
    let at = |i: usize, j: usize| i * width + j + kl - i;
    let mut pivots = vec![0; n];
    for k in 0..n {
        let last_row = (k + kl).min(n - 1);
        let last_col = (k + kl + ku).min(n - 1);

        let mut p = k;
        let mut best = band[at(k, k)].abs();
        for i in k + 1..=last_row {
            let v = band[at(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        pivots[k] = p;
        if best == T::zero() || !best.is_finite() {
            return Err(Error::Singular { column: k });
        }
        let span = last_col - k + 1;
        if p != k {
            let (head, tail) = band.split_at_mut(at(p, k));
            let krow = &mut head[at(k, k)..at(k, k) + span];
            krow.swap_with_slice(&mut tail[..span]);
        }

        let pivot = band[at(k, k)];
        for i in k + 1..=last_row {
            let ik = at(i, k);
            let factor = band[ik] / pivot;
            band[ik] = factor;
            if factor == T::zero() {
                continue;
            }
            let (head, tail) = band.split_at_mut(ik);
            let krow = &head[at(k, k) + 1..at(k, k) + span];
            for (u, &v) in tail[1..span].iter_mut().zip(krow) {
                *u = *u - factor * v;
            }
        }
    }
    Ok(pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense_lu_solve, DenseMatrix};

    #[test]
    fn diagonal_solve() {
        let a = CsrMatrix::from_triplets(3, 3, [(0, 0, 2.0), (1, 1, 3.0), (2, 2, 4.0)]).unwrap();
        let lu = BandedLu::factor(&a).unwrap();
        assert_eq!(lu.solve(&[2.0, 3.0, 4.0]).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn zero_one_by_one_is_singular() {
        let a = CsrMatrix::from_triplets(1, 1, [(0, 0, 0.0)]).unwrap();
        assert!(matches!(
            BandedLu::factor(&a),
            Err(Error::Singular { column: 0 })
        ));
    }

    #[test]
    fn empty_matrix_factors() {
        let lu = BandedLu::factor(&CsrMatrix::<f64>::zeros(0, 0)).unwrap();
        assert!(lu.solve(&[]).unwrap().is_empty());
    }

    #[test]
    fn pivoting_needed_tridiagonal() {
        // zero diagonal forces interchanges inside the band
        let a = CsrMatrix::from_triplets(
            4,
            4,
            [
                (0, 0, 0.0),
                (0, 1, 1.0),
                (1, 0, 2.0),
                (1, 1, 0.0),
                (1, 2, 1.0),
                (2, 1, 3.0),
                (2, 2, 0.0),
                (2, 3, 1.0),
                (3, 2, 4.0),
                (3, 3, 1.0),
            ],
        )
        .unwrap();
        let b = [1.0f64, 2.0, 3.0, 4.0];
        let x = BandedLu::factor(&a).unwrap().solve(&b).unwrap();
        let oracle = dense_lu_solve(&a.to_dense(), &b).unwrap();
        for (u, v) in x.iter().zip(&oracle) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn wide_band_against_dense() {
        let n = 12;
        let dense = DenseMatrix::from_fn(n, n, |i, j| {
            let d = i.abs_diff(j);
            if d > 3 {
                0.0
            } else {
                ((i * 7 + j * 3) % 11) as f64 - 5.0 + if d == 0 { 0.5 } else { 0.0 }
            }
        });
        let a = CsrMatrix::from_dense(&dense);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = BandedLu::factor(&a).unwrap().solve(&b).unwrap();
        let oracle = dense_lu_solve(&dense, &b).unwrap();
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (u, v) in x.iter().zip(&oracle) {
            assert!((u - v).abs() <= 1e-11 * scale, "{u} vs {v}");
        }
    }
}

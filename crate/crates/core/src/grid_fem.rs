//! P1 finite element discretisation of `-Δu - k²u = f` on the unit square
//! with homogeneous Dirichlet data.
//!
//! The grid has `n_glob` interior nodes per axis and spacing `h = 1/(n_glob+1)`.
//! Every cell is split by its lower-left to upper-right diagonal. Boundary
//! nodes are eliminated, so unknowns are the interior nodes in lexicographic
//! order with `x` running fastest: node `(ix, iy)` has index `iy * n_glob + ix`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Wave number.
    pub k: f64,
    /// Interior nodes per axis.
    pub n_glob: usize,
    /// Mesh spacing, `1 / (n_glob + 1)`.
    pub h: f64,
    /// Points per wavelength, `2π / (k h)`; infinite when `k = 0`.
    pub n_ppwl: f64,
}

impl GridSpec {
    /// Total number of interior unknowns.
    pub fn n_dofs(&self) -> usize {
        self.n_glob * self.n_glob
    }

    /// Flat index of interior node `(ix, iy)` (0-based).
    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n_glob + ix
    }
}

/// Validated grid construction. `k = 0` is accepted as the Laplace limit.
pub fn build_grid(k: f64, n_glob: usize) -> Result<GridSpec> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::InvalidWaveNumber(k));
    }
    if n_glob < 3 {
        return Err(Error::GridTooSmall(n_glob));
    }
    let h = 1.0 / (n_glob + 1) as f64;
    Ok(GridSpec {
        k,
        n_glob,
        h,
        n_ppwl: 2.0 * PI / (k * h),
    })
}

/// Assembles `A = K - k² M` for a validated grid.
pub fn assemble_matrix<T: Scalar>(grid: &GridSpec) -> CsrMatrix<T> {
    assemble_helmholtz(grid.k, grid.n_glob)
}

/// Stencil assembly for any `n_glob >= 1`.
///
/// Interior stencil: centre `4 - k²h²/2`; N, S, E, W `-1 - k²h²/12`;
/// the two diagonal neighbours along the cell split `-k²h²/12`.
pub fn assemble_helmholtz<T: Scalar>(k: f64, n_glob: usize) -> CsrMatrix<T> {
    let n = n_glob;
    // k²h² = k² / (n+1)², one rounding instead of squaring a rounded h
    let kh2 = k * k / ((n + 1) * (n + 1)) as f64;
    let centre = T::lit(4.0 - kh2 / 2.0);
    let edge = T::lit(-1.0 - kh2 / 12.0);
    let diag = T::lit(-kh2 / 12.0);
    let with_diagonals = diag != T::zero();

    let mut row_offsets = Vec::with_capacity(n * n + 1);
    let mut col_indices = Vec::with_capacity(7 * n * n);
    let mut values = Vec::with_capacity(7 * n * n);
    row_offsets.push(0);
    for iy in 0..n {
        for ix in 0..n {
            let me = iy * n + ix;
            // ascending column order
            if iy > 0 {
                if with_diagonals && ix > 0 {
                    col_indices.push(me - n - 1);
                    values.push(diag);
                }
                col_indices.push(me - n);
                values.push(edge);
            }
            if ix > 0 {
                col_indices.push(me - 1);
                values.push(edge);
            }
            col_indices.push(me);
            values.push(centre);
            if ix + 1 < n {
                col_indices.push(me + 1);
                values.push(edge);
            }
            if iy + 1 < n {
                col_indices.push(me + n);
                values.push(edge);
                if with_diagonals && ix + 1 < n {
                    col_indices.push(me + n + 1);
                    values.push(diag);
                }
            }
            row_offsets.push(col_indices.len());
        }
    }
    CsrMatrix::new(n * n, n * n, row_offsets, col_indices, values)
        .expect("stencil assembly produces valid CSR")
}

/// Per-axis 0-based index of the node nearest 0.5 (ties toward the lower node).
pub fn centre_node(n_glob: usize) -> usize {
    n_glob.div_ceil(2) - 1
}

/// Unit point load at the interior node nearest the centre of the square.
pub fn assemble_rhs<T: Scalar>(grid: &GridSpec) -> Vec<T> {
    let mut f = vec![T::zero(); grid.n_dofs()];
    let c = centre_node(grid.n_glob);
    f[grid.index(c, c)] = T::one();
    f
}

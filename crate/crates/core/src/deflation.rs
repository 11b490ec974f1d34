//! Two-level deflation for subdomain systems.
//!
//! The deflation space is spanned by the columns of a prolongation `Z`
//! (fine x coarse) built from the 1D stencil `[1 4 6 4 1] / 8`, extended to
//! 2D by `Z = Z_y ⊗ Z_x` (x fastest). With `E = Zᵀ A Z`, `Q = Z E⁻¹ Zᵀ` and
//! `P = I - A Q`, GMRES runs on `P A x̂ = P f` and the solution is recovered
//! as `u = Q f + (I - Q A) x̂`, for which `f - A u = P (f - A x̂)`.

use crate::decomposition::LocalSystem;
use crate::error::{check_dim, Error, Result};
use crate::krylov::{gmres, identity, SolveReport, SolverConfig};
use crate::linalg::{sparse_triple_product, BandedLu, CsrMatrix};
use crate::scalar::{norm2, Scalar};

const STENCIL: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];

/// 1D prolongation, `n x floor(n/2)`.
///
/// Column `c` (0-based) carries the stencil on fine rows `2c - 1 ..= 2c + 3`;
/// rows outside `0..n` are dropped.
pub fn build_deflation_1d<T: Scalar>(n: usize) -> Result<CsrMatrix<T>> {
    if n < 4 {
        return Err(Error::SubdomainTooSmall(n));
    }
    let n_coarse = n / 2;
    let eighth = T::lit(0.125);
    let triplets = (0..n_coarse).flat_map(|c| {
        STENCIL.iter().enumerate().filter_map(move |(s, &w)| {
            // 1-based fine row 2(c+1) - 2 + s, shifted to 0-based
            let row = (2 * c + s).checked_sub(1)?;
            (row < n).then(|| (row, c, T::lit(w) * eighth))
        })
    });
    CsrMatrix::from_triplets(n, n_coarse, triplets)
}

/// 2D prolongation `Z_y ⊗ Z_x` on an `nx x ny` box.
pub fn build_deflation_2d<T: Scalar>(nx: usize, ny: usize) -> Result<CsrMatrix<T>> {
    let zx = build_deflation_1d::<T>(nx)?;
    let zy = build_deflation_1d::<T>(ny)?;
    Ok(zy.kron(&zx))
}

/// Per-subdomain deflation state; immutable after construction.
#[derive(Debug, Clone)]
pub struct DeflationContext<T> {
    pub id: usize,
    pub z: CsrMatrix<T>,
    pub zt: CsrMatrix<T>,
    pub e: CsrMatrix<T>,
    e_factor: BandedLu<T>,
    pub n_cx: usize,
    pub n_cy: usize,
}

impl<T: Scalar> DeflationContext<T> {
    /// Bézier deflation for a local box (both sides must be at least 4 nodes).
    pub fn build(local: &LocalSystem<T>) -> Result<Self> {
        let z = build_deflation_2d::<T>(local.nx, local.ny).map_err(|e| e.in_subdomain(local.id))?;
        let mut ctx = Self::from_basis(local.id, &local.matrix, z)?;
        ctx.n_cx = local.nx / 2;
        ctx.n_cy = local.ny / 2;
        Ok(ctx)
    }

    /// Deflation with an arbitrary basis `z` (columns span the deflation space).
    pub fn from_basis(id: usize, a: &CsrMatrix<T>, z: CsrMatrix<T>) -> Result<Self> {
        check_dim("deflation basis rows", a.n_rows(), z.n_rows())?;
        let zt = z.transpose();
        let e = sparse_triple_product(&zt, a, &z)?;
        let e_factor = BandedLu::factor(&e).map_err(|err| err.in_subdomain(id))?;
        let n_c = z.n_cols();
        Ok(Self {
            id,
            z,
            zt,
            e,
            e_factor,
            n_cx: n_c,
            n_cy: 1,
        })
    }

    pub fn n_coarse(&self) -> usize {
        self.z.n_cols()
    }

    pub fn n_fine(&self) -> usize {
        self.z.n_rows()
    }

    /// `Q v = Z E⁻¹ Zᵀ v`.
    pub fn apply_q(&self, v: &[T]) -> Vec<T> {
        let mut coarse = vec![T::zero(); self.n_coarse()];
        self.zt.mul_vec_into(v, &mut coarse);
        self.e_factor.solve_in_place(&mut coarse);
        let mut out = vec![T::zero(); self.n_fine()];
        self.z.mul_vec_into(&coarse, &mut out);
        out
    }

    /// `P w = w - A Q w`.
    pub fn apply_projector(&self, a: &CsrMatrix<T>, w: &[T]) -> Vec<T> {
        let q = self.apply_q(w);
        let mut aq = vec![T::zero(); w.len()];
        a.mul_vec_into(&q, &mut aq);
        w.iter().zip(&aq).map(|(&wi, &ai)| wi - ai).collect()
    }
}

/// `P A v`, with one coarse solve per application.
pub fn apply_deflated_operator<T: Scalar>(ctx: &DeflationContext<T>, a: &CsrMatrix<T>, v: &[T]) -> Vec<T> {
    let mut av = vec![T::zero(); v.len()];
    a.mul_vec_into(v, &mut av);
    ctx.apply_projector(a, &av)
}

/// Deflated subdomain solve.
///
/// Runs unpreconditioned GMRES on `P A x̂ = P f` (convergence measured on the
/// deflated residual) and reconstructs `u = x̂ + Q (f - A x̂)`. The returned
/// report's `final_true_relative_residual` is `‖f - A u‖ / ‖f‖`.
pub fn solve_deflated<T: Scalar>(
    ctx: &DeflationContext<T>,
    a: &CsrMatrix<T>,
    f: &[T],
    cfg: &SolverConfig,
) -> Result<(Vec<T>, SolveReport)> {
    check_dim("deflated solve: rhs", a.n_rows(), f.len())?;
    let n = f.len();
    let f_norm = norm2(f);
    if f_norm == T::zero() {
        return gmres(identity, identity, f, &vec![T::zero(); n], cfg);
    }
    let pf = ctx.apply_projector(a, f);
    let op = |x: &[T], y: &mut [T]| y.copy_from_slice(&apply_deflated_operator(ctx, a, x));
    let (x_hat, mut report) = gmres(op, identity, &pf, &vec![T::zero(); n], cfg)?;

    let mut ax = vec![T::zero(); n];
    a.mul_vec_into(&x_hat, &mut ax);
    let r: Vec<T> = f.iter().zip(&ax).map(|(&fi, &ai)| fi - ai).collect();
    let correction = ctx.apply_q(&r);
    let u: Vec<T> = x_hat.iter().zip(&correction).map(|(&x, &c)| x + c).collect();

    a.mul_vec_into(&u, &mut ax);
    let true_res = f
        .iter()
        .zip(&ax)
        .map(|(&fi, &ai)| (fi - ai) * (fi - ai))
        .sum::<T>()
        .sqrt();
    report.final_true_relative_residual = (true_res / f_norm).as_f64();
    Ok((u, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_d_columns_n8() {
        let z = build_deflation_1d::<f64>(8).unwrap();
        assert_eq!((z.n_rows(), z.n_cols()), (8, 4));
        let col = |c: usize| (0..8).map(|r| z.get(r, c) * 8.0).collect::<Vec<_>>();
        assert_eq!(col(0), vec![4.0, 6.0, 4.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(col(1), vec![0.0, 1.0, 4.0, 6.0, 4.0, 1.0, 0.0, 0.0]);
        assert_eq!(col(3), vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 4.0, 6.0]);
    }

    #[test]
    fn restriction_of_ones() {
        let n = 10;
        let zt = build_deflation_1d::<f64>(n).unwrap().transpose();
        let out = zt.spmv(&vec![1.0; n]).unwrap();
        for (i, v) in out.iter().enumerate() {
            let fine_centre = 2 * (i + 1);
            if fine_centre >= 3 && fine_centre + 2 <= n {
                assert_eq!(*v, 2.0);
            }
        }
    }

    #[test]
    fn odd_size_floors_coarse() {
        let z = build_deflation_1d::<f64>(7).unwrap();
        assert_eq!(z.n_cols(), 3);
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            build_deflation_1d::<f64>(3),
            Err(Error::SubdomainTooSmall(3))
        ));
        assert!(build_deflation_2d::<f64>(6, 3).is_err());
    }

    #[test]
    fn zero_maps_to_zero() {
        let z = build_deflation_2d::<f64>(6, 8).unwrap();
        assert!(z.spmv(&vec![0.0; z.n_cols()]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_basis_is_plain_operator() {
        let a = crate::grid_fem::assemble_helmholtz::<f64>(5.0, 4);
        let ctx = DeflationContext::from_basis(0, &a, CsrMatrix::zeros(16, 0)).unwrap();
        let v: Vec<f64> = (0..16).map(|i| (i as f64).cos()).collect();
        assert_eq!(apply_deflated_operator(&ctx, &a, &v), a.spmv(&v).unwrap());
    }

    #[test]
    fn zero_rhs_zero_iterations() {
        let a = crate::grid_fem::assemble_helmholtz::<f64>(5.0, 6);
        let local = LocalSystem { id: 0, matrix: a.clone(), nx: 6, ny: 6 };
        let ctx = DeflationContext::build(&local).unwrap();
        let cfg = SolverConfig::new(1e-10, 100).unwrap();
        let (u, rep) = solve_deflated(&ctx, &a, &vec![0.0; 36], &cfg).unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(u.iter().all(|&v| v == 0.0));
    }
}

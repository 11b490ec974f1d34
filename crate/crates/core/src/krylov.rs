//! Right-preconditioned GMRES and flexible GMRES.
//!
//! Both solvers share one Arnoldi cycle (modified Gram-Schmidt, single pass)
//! with Givens rotations on the Hessenberg matrix. Convergence is always
//! judged on the true residual `‖b - A x‖ / ‖b‖`, which is recomputed at the
//! end of every cycle; the Givens estimate only decides when a cycle stops.
//!
//! Operators and preconditioners are callbacks `(input, output)`.

use std::time::Instant;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::scalar::{axpy, dot, norm2, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Relative residual target, in `(0, 1)`.
    pub rel_tol: f64,
    pub max_iterations: usize,
    /// Krylov dimension before restart; `None` means unrestarted.
    pub restart: Option<usize>,
}

impl SolverConfig {
    pub fn new(rel_tol: f64, max_iterations: usize) -> Result<Self> {
        let cfg = Self {
            rel_tol,
            max_iterations,
            restart: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_restart(mut self, restart: Option<usize>) -> Result<Self> {
        self.restart = restart;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Result<Self> {
        self.max_iterations = max_iterations;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.restart == Some(0) {
            return Err(Error::InvalidConfig("restart length must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveReport {
    /// Arnoldi steps, summed over restart cycles.
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual estimates; entry 0 is the initial residual.
    pub relative_residuals: Vec<f64>,
    pub final_true_relative_residual: f64,
    /// Seconds.
    pub wall_time: f64,
}

/// Identity preconditioner.
pub fn identity<T: Scalar>(x: &[T], y: &mut [T]) {
    y.copy_from_slice(x);
}

/// Arnoldi relation `A M⁻¹ V_k = V_{k+1} H̄_k`, with `H̄_k` stored by column.
#[derive(Debug, Clone)]
pub struct ArnoldiBasis<T> {
    /// Orthonormal basis vectors.
    pub v: Vec<Vec<T>>,
    /// Preconditioned vectors `M⁻¹ v_j` (flexible variant only).
    pub z: Vec<Vec<T>>,
    /// Column `j` has `j + 2` entries: `h[0..=j+1][j]`.
    pub h: Vec<Vec<T>>,
    /// Set when the last step produced a (numerically) zero vector.
    pub breakdown: bool,
}

impl<T: Scalar> ArnoldiBasis<T> {
    fn start(r: &[T], beta: T) -> Self {
        let inv = T::one() / beta;
        Self {
            v: vec![r.iter().map(|&x| x * inv).collect()],
            z: Vec::new(),
            h: Vec::new(),
            breakdown: false,
        }
    }

    /// One Arnoldi step; returns the new Hessenberg column.
    fn step<A, M>(&mut self, apply_a: &mut A, apply_m: &mut M, keep_z: bool) -> &[T]
    where
        A: FnMut(&[T], &mut [T]),
        M: FnMut(&[T], &mut [T]),
    {
        let j = self.h.len();
        let n = self.v[0].len();
        let mut zj = vec![T::zero(); n];
        apply_m(&self.v[j], &mut zj);
        let mut w = vec![T::zero(); n];
        apply_a(&zj, &mut w);
        if keep_z {
            self.z.push(zj);
        }
        let w_norm0 = norm2(&w);
        let mut col = Vec::with_capacity(j + 2);
        for vi in &self.v[..=j] {
            let hij = dot(&w, vi);
            axpy(-hij, vi, &mut w);
            col.push(hij);
        }
        let hnext = norm2(&w);
        col.push(hnext);
        if hnext <= T::epsilon() * w_norm0 || hnext == T::zero() || !hnext.is_finite() {
            self.breakdown = true;
        } else {
            let inv = T::one() / hnext;
            w.iter_mut().for_each(|x| *x = *x * inv);
            self.v.push(w);
        }
        self.h.push(col);
        self.h.last().expect("column just pushed")
    }
}

/// Runs `steps` Arnoldi steps from `v0` (stops early on breakdown).
pub fn arnoldi<T, A, M>(
    mut apply_a: A,
    mut apply_m: M,
    v0: &[T],
    steps: usize,
    flexible: bool,
) -> ArnoldiBasis<T>
where
    T: Scalar,
    A: FnMut(&[T], &mut [T]),
    M: FnMut(&[T], &mut [T]),
{
    let mut basis = ArnoldiBasis::start(v0, norm2(v0));
    for _ in 0..steps {
        basis.step(&mut apply_a, &mut apply_m, flexible);
        if basis.breakdown {
            break;
        }
    }
    basis
}

/// Right-preconditioned GMRES: solves `A M⁻¹ y = b`, `x = M⁻¹ y`.
///
/// `apply_m` must be a fixed linear operator.
pub fn gmres<T, A, M>(
    apply_a: A,
    apply_m: M,
    b: &[T],
    x0: &[T],
    cfg: &SolverConfig,
) -> Result<(Vec<T>, SolveReport)>
where
    T: Scalar,
    A: FnMut(&[T], &mut [T]),
    M: FnMut(&[T], &mut [T]),
{
    solve(apply_a, apply_m, b, x0, cfg, false)
}

/// Flexible GMRES: the preconditioner may change between iterations.
pub fn fgmres<T, A, M>(
    apply_a: A,
    apply_m: M,
    b: &[T],
    x0: &[T],
    cfg: &SolverConfig,
) -> Result<(Vec<T>, SolveReport)>
where
    T: Scalar,
    A: FnMut(&[T], &mut [T]),
    M: FnMut(&[T], &mut [T]),
{
    solve(apply_a, apply_m, b, x0, cfg, true)
}

fn residual<T: Scalar, A: FnMut(&[T], &mut [T])>(apply_a: &mut A, b: &[T], x: &[T]) -> Vec<T> {
    let mut ax = vec![T::zero(); b.len()];
    apply_a(x, &mut ax);
    b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect()
}

/// Givens rotation zeroing `b` in `(a, b)`.
fn givens<T: Scalar>(a: T, b: T) -> (T, T) {
    if b == T::zero() {
        (T::one(), T::zero())
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}

fn solve<T, A, M>(
    mut apply_a: A,
    mut apply_m: M,
    b: &[T],
    x0: &[T],
    cfg: &SolverConfig,
    flexible: bool,
) -> Result<(Vec<T>, SolveReport)>
where
    T: Scalar,
    A: FnMut(&[T], &mut [T]),
    M: FnMut(&[T], &mut [T]),
{
    cfg.validate()?;
    check_dim("Krylov initial guess", b.len(), x0.len())?;
    let started = Instant::now();
    let n = b.len();
    let b_norm = norm2(b);

    if b_norm == T::zero() {
        return Ok((
            vec![T::zero(); n],
            SolveReport {
                iterations: 0,
                converged: true,
                relative_residuals: vec![0.0],
                final_true_relative_residual: 0.0,
                wall_time: started.elapsed().as_secs_f64(),
            },
        ));
    }

    let mut x = x0.to_vec();
    let mut r = if x.iter().all(|&v| v == T::zero()) {
        b.to_vec()
    } else {
        residual(&mut apply_a, b, &x)
    };
    let mut beta = norm2(&r);
    let tol = T::lit(cfg.rel_tol) * b_norm;
    let mut history = vec![(beta / b_norm).as_f64()];
    let mut iterations = 0usize;
    let mut converged = beta <= tol;

    while !converged && iterations < cfg.max_iterations {
        let cycle_len = cfg
            .restart
            .unwrap_or(usize::MAX)
            .min(cfg.max_iterations - iterations);
        let mut basis = ArnoldiBasis::start(&r, beta);
        let mut rotations: Vec<(T, T)> = Vec::new();
        let mut upper: Vec<Vec<T>> = Vec::new();
        let mut g = vec![beta];

        for j in 0..cycle_len {
            iterations += 1;
            let mut col = basis.step(&mut apply_a, &mut apply_m, flexible).to_vec();
            for (i, &(c, s)) in rotations.iter().enumerate() {
                let (hi, hk) = (col[i], col[i + 1]);
                col[i] = c * hi + s * hk;
                col[i + 1] = c * hk - s * hi;
            }
            let (c, s) = givens(col[j], col[j + 1]);
            col[j] = c * col[j] + s * col[j + 1];
            col.truncate(j + 1);
            rotations.push((c, s));
            upper.push(col);
            let gj = g[j];
            g[j] = c * gj;
            g.push(-s * gj);

            let estimate = g[j + 1].abs();
            history.push((estimate / b_norm).as_f64());
            if estimate <= tol || basis.breakdown {
                break;
            }
        }

        // back substitution on the triangular factor
        let m = upper.len();
        let mut y = vec![T::zero(); m];
        for i in (0..m).rev() {
            let mut s = g[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                s = s - upper[k][i] * *yk;
            }
            y[i] = if upper[i][i] == T::zero() {
                T::zero()
            } else {
                s / upper[i][i]
            };
        }
        if flexible {
            for (zi, &yi) in basis.z.iter().zip(&y) {
                axpy(yi, zi, &mut x);
            }
        } else {
            let mut u = vec![T::zero(); n];
            for (vi, &yi) in basis.v.iter().zip(&y) {
                axpy(yi, vi, &mut u);
            }
            let mut t = vec![T::zero(); n];
            apply_m(&u, &mut t);
            axpy(T::one(), &t, &mut x);
        }

        r = residual(&mut apply_a, b, &x);
        beta = norm2(&r);
        converged = beta <= tol;
        if !converged && basis.breakdown && m == 0 {
            break;
        }
        if !beta.is_finite() {
            break;
        }
    }

    Ok((
        x,
        SolveReport {
            iterations,
            converged,
            relative_residuals: history,
            final_true_relative_residual: (beta / b_norm).as_f64(),
            wall_time: started.elapsed().as_secs_f64(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(tol: f64, max: usize) -> SolverConfig {
        SolverConfig::new(tol, max).unwrap()
    }

    #[test]
    fn identity_converges_in_one_step() {
        let b = [1.0f64, -2.0, 3.0];
        let (x, rep) = gmres(identity, identity, &b, &[0.0; 3], &cfg(1e-12, 10)).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        for (u, v) in x.iter().zip(&b) {
            assert!((u - v).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let (x, rep) = fgmres(identity, identity, &[0.0; 4], &[0.0; 4], &cfg(1e-6, 10)).unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(rep.converged);
        assert_eq!(x, vec![0.0; 4]);
        assert_eq!(rep.relative_residuals.len(), 1);
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(SolverConfig::new(0.0, 10).is_err());
        assert!(SolverConfig::new(1.0, 10).is_err());
        assert!(SolverConfig::new(1e-6, 0).is_err());
        assert!(cfg(1e-6, 5).with_restart(Some(0)).is_err());
    }

    #[test]
    fn diagonal_system_finite_termination() {
        let d = [1.0, 2.0, 3.0, 4.0, 5.0];
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..5 {
                y[i] = d[i] * x[i];
            }
        };
        let b = [1.0; 5];
        let (x, rep) = gmres(apply, identity, &b, &[0.0; 5], &cfg(1e-12, 50)).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations <= 5);
        for i in 0..5 {
            assert!((x[i] - 1.0 / d[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn restarted_run_still_converges() {
        let n = 20;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                y[i] = 3.0 * x[i]
                    - if i > 0 { x[i - 1] } else { 0.0 }
                    - if i + 1 < n { x[i + 1] } else { 0.0 };
            }
        };
        let b = vec![1.0; n];
        let c = cfg(1e-10, 500).with_restart(Some(3)).unwrap();
        let (_, rep) = gmres(apply, identity, &b, &vec![0.0; n], &c).unwrap();
        assert!(rep.converged);
        assert!(rep.final_true_relative_residual <= 1e-10);
    }

    #[test]
    fn max_iterations_reports_unconverged() {
        let n = 30;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                y[i] = (i + 1) as f64 * x[i];
            }
        };
        let b = vec![1.0; n];
        let (_, rep) = gmres(apply, identity, &b, &vec![0.0; n], &cfg(1e-12, 3)).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
        assert_eq!(rep.relative_residuals.len(), 4);
    }

    #[test]
    fn nonzero_initial_guess() {
        let apply = |x: &[f64], y: &mut [f64]| {
            y[0] = 2.0 * x[0] + x[1];
            y[1] = x[0] + 3.0 * x[1];
        };
        let (x, rep) = fgmres(apply, identity, &[3.0, 4.0], &[5.0, -5.0], &cfg(1e-12, 10)).unwrap();
        assert!(rep.converged);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }
}

//! Quick invariant checks on small problems, run by `hsolve selftest`.

use crate::decomposition::{build_partition, extract_local_matrix};
use crate::deflation::{apply_deflated_operator, solve_deflated, DeflationContext};
use crate::grid_fem::{assemble_matrix, assemble_rhs, build_grid};
use crate::harness::experiment::{default_outer, run_cell};
use crate::krylov::SolverConfig;
use crate::linalg::{dense_lu_solve, BandedLu};
use crate::ras::{build_ras, StrategyKind, SubdomainStrategy};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

// deterministic, non-trivial test vector
fn probe(n: usize) -> Vec<f64> {
    (0..n).map(|i| ((i * 37 % 101) as f64 - 50.0) / 50.0).collect()
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn partition_of_unity() -> Result<Check> {
    let grid = build_grid(20.0, 30)?;
    let mut worst = String::new();
    for n in [1, 4, 9, 16, 25] {
        let p = build_partition(&grid, n, 1)?;
        if p.ownership_counts().iter().any(|&c| c != 1) || p.coverage_counts().contains(&0) {
            worst = format!("N = {n}");
        }
    }
    Ok(check(
        "partition of unity",
        worst.is_empty(),
        if worst.is_empty() { "every node owned exactly once".into() } else { format!("violated at {worst}") },
    ))
}

fn banded_vs_dense() -> Result<Check> {
    let a = assemble_matrix::<f64>(&build_grid(20.0, 7)?);
    let b = probe(a.n_rows());
    let x = BandedLu::factor(&a)?.solve(&b)?;
    let oracle = dense_lu_solve(&a.to_dense(), &b)?;
    let err = max_diff(&x, &oracle) / max_abs(&oracle);
    Ok(check("banded LU matches dense LU", err < 1e-12, format!("relative error {err:.2e}")))
}

fn deflation_projector() -> Result<Check> {
    let a = assemble_matrix::<f64>(&build_grid(20.0, 12)?);
    let local = crate::decomposition::LocalSystem { id: 0, matrix: a.clone(), nx: 12, ny: 12 };
    let ctx = DeflationContext::build(&local)?;
    // P A Z e_c = 0 for every coarse column
    let mut annihilation = 0.0f64;
    for c in 0..ctx.n_coarse() {
        let mut e = vec![0.0; ctx.n_coarse()];
        e[c] = 1.0;
        let zc = ctx.z.spmv(&e)?;
        annihilation = annihilation.max(max_abs(&apply_deflated_operator(&ctx, &a, &zc)) / max_abs(&zc));
    }
    let w = probe(a.n_rows());
    let pw = ctx.apply_projector(&a, &w);
    let ppw = ctx.apply_projector(&a, &pw);
    let idem = max_diff(&pw, &ppw) / max_abs(&pw);
    Ok(check(
        "deflation projector",
        annihilation < 1e-10 && idem < 1e-10,
        format!("|PAZ| {annihilation:.2e}, |P²-P| {idem:.2e}"),
    ))
}

fn deflated_solve_vs_direct() -> Result<Check> {
    let a = assemble_matrix::<f64>(&build_grid(20.0, 16)?);
    let local = crate::decomposition::LocalSystem { id: 0, matrix: a.clone(), nx: 16, ny: 16 };
    let ctx = DeflationContext::build(&local)?;
    let f = probe(a.n_rows());
    let (u, report) = solve_deflated(&ctx, &a, &f, &SolverConfig::new(1e-12, 1000)?)?;
    let direct = BandedLu::factor(&a)?.solve(&f)?;
    let err = max_diff(&u, &direct) / max_abs(&direct);
    Ok(check(
        "deflated solve matches direct",
        err < 1e-8 && report.converged,
        format!("{} iterations, relative error {err:.2e}", report.iterations),
    ))
}

fn single_subdomain_is_exact() -> Result<Check> {
    let grid = build_grid(20.0, 12)?;
    let a = assemble_matrix::<f64>(&grid);
    let p = build_partition(&grid, 1, 1)?;
    let ras = build_ras(&a, &p, SubdomainStrategy::Direct)?;
    let r = probe(a.n_rows());
    let z = ras.apply(&r)?;
    let oracle = dense_lu_solve(&a.to_dense(), &r)?;
    let err = max_diff(&z, &oracle) / max_abs(&oracle);
    Ok(check("RAS with one subdomain inverts A", err < 1e-10, format!("relative error {err:.2e}")))
}

fn scatter_order_independence() -> Result<Check> {
    let grid = build_grid(20.0, 30)?;
    let a = assemble_matrix::<f64>(&grid);
    let p = build_partition(&grid, 9, 1)?;
    let ras = build_ras(&a, &p, SubdomainStrategy::inexact(StrategyKind::Deflation, 1e-8)?)?;
    let r = probe(a.n_rows());
    let forward = ras.apply(&r)?;
    let backward = ras.apply_ordered(&r, &(0..9).rev().collect::<Vec<_>>())?;
    let same = forward == backward;
    Ok(check(
        "RAS independent of scatter order",
        same,
        format!("max difference {:.2e}", max_diff(&forward, &backward)),
    ))
}

fn outer_convergence_and_scaling() -> Result<Check> {
    let outer = default_outer();
    let base = run_cell(20.0, 30, 4, SubdomainStrategy::Direct, &outer, 1, 1.0)?;
    let scaled = run_cell(20.0, 30, 4, SubdomainStrategy::Direct, &outer, 1, 1e3)?;
    let ok = base.converged && base.final_residual <= 1e-6 && base.outer_iterations == scaled.outer_iterations;
    Ok(check(
        "outer FGMRES converges, scale invariant",
        ok,
        format!(
            "{} vs {} iterations, true residual {:.2e}",
            base.outer_iterations, scaled.outer_iterations, base.final_residual
        ),
    ))
}

fn rhs_is_centre_point_load() -> Result<Check> {
    let grid = build_grid(20.0, 30)?;
    let f = assemble_rhs::<f64>(&grid);
    let pos = f.iter().position(|&v| v == 1.0);
    let ok = pos == Some(grid.index(14, 14)) && f.iter().filter(|&&v| v != 0.0).count() == 1;
    Ok(check("point source at grid centre", ok, format!("nonzero at {pos:?}")))
}

fn local_matrices_are_symmetric() -> Result<Check> {
    let grid = build_grid(40.0, 60)?;
    let a = assemble_matrix::<f64>(&grid);
    let p = build_partition(&grid, 16, 1)?;
    let ok = (0..16).all(|j| extract_local_matrix(&a, &p, j).matrix.is_symmetric());
    Ok(check("local matrices symmetric", ok && a.is_symmetric(), "k = 40, N = 16".into()))
}

type CheckFn = fn() -> Result<Check>;

/// Runs every check; an error inside a check counts as a failure.
pub fn run_selftest() -> Vec<Check> {
    let checks: [(&'static str, CheckFn); 9] = [
        ("point source at grid centre", rhs_is_centre_point_load),
        ("partition of unity", partition_of_unity),
        ("local matrices symmetric", local_matrices_are_symmetric),
        ("banded LU matches dense LU", banded_vs_dense),
        ("deflation projector", deflation_projector),
        ("deflated solve matches direct", deflated_solve_vs_direct),
        ("RAS with one subdomain inverts A", single_subdomain_is_exact),
        ("RAS independent of scatter order", scatter_order_independence),
        ("outer FGMRES converges, scale invariant", outer_convergence_and_scaling),
    ];
    checks
        .iter()
        .map(|(name, f)| f().unwrap_or_else(|e| check(name, false, format!("error: {e}"))))
        .collect()
}

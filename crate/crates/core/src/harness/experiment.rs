//! Sweep configuration and the per-cell solve pipeline.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::build_partition;
use crate::error::{Error, Result};
use crate::grid_fem::{assemble_matrix, assemble_rhs, build_grid};
use crate::krylov::{fgmres, SolverConfig};
use crate::ras::{build_ras, StrategyKind, SubdomainStrategy};

/// Grid resolution selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Resolution {
    /// Table presets: 10 ppwl gives `n_glob = 1.5 k`, 20 ppwl gives `n_glob = 3 k`.
    Ppwl(u32),
    /// Fixed interior node count per axis for every `k`.
    NGlob(usize),
}

impl Resolution {
    pub fn n_glob(&self, k: f64) -> Result<usize> {
        match *self {
            Resolution::NGlob(n) => Ok(n),
            Resolution::Ppwl(p) if p == 10 || p == 20 => {
                let n = k * 1.5 * f64::from(p / 10);
                if n.fract() != 0.0 || n < 3.0 {
                    return Err(Error::InvalidConfig(format!(
                        "{p} ppwl preset needs k with integral n_glob, got k = {k}"
                    )));
                }
                Ok(n as usize)
            }
            Resolution::Ppwl(p) => Err(Error::InvalidConfig(format!(
                "ppwl preset must be 10 or 20, got {p}"
            ))),
        }
    }

    pub fn ppwl_label(&self) -> Option<u32> {
        match *self {
            Resolution::Ppwl(p) => Some(p),
            Resolution::NGlob(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ks: Vec<f64>,
    pub resolution: Resolution,
    pub subdomains: Vec<usize>,
    pub strategy: StrategyKind,
    /// Ignored for the direct strategy.
    pub inner_tol: f64,
    pub outer: SolverConfig,
    pub overlap: usize,
    /// Scale applied to the point source (iteration counts are invariant to it).
    pub rhs_scale: f64,
}

impl ExperimentConfig {
    pub fn new(ks: Vec<f64>, resolution: Resolution, subdomains: Vec<usize>, strategy: StrategyKind) -> Self {
        Self {
            ks,
            resolution,
            subdomains,
            strategy,
            inner_tol: 1e-10,
            outer: default_outer(),
            overlap: 1,
            rhs_scale: 1.0,
        }
    }

    pub fn with_inner_tol(mut self, tol: f64) -> Self {
        self.inner_tol = tol;
        self
    }
}

/// Outer FGMRES: relative residual `1e-6`, unrestarted.
pub fn default_outer() -> SolverConfig {
    SolverConfig {
        rel_tol: 1e-6,
        max_iterations: 5000,
        restart: None,
    }
}

/// One `(k, n_glob, N)` solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub k: f64,
    pub n_glob: usize,
    #[serde(rename = "N")]
    pub n_subdomains: usize,
    pub ppwl: Option<u32>,
    pub n_ppwl: f64,
    pub strategy: StrategyKind,
    pub inner_tol: Option<f64>,
    pub outer_iterations: usize,
    pub avg_inner_iterations: Option<usize>,
    pub total_inner_iterations: usize,
    pub subdomain_solve_count: usize,
    pub preconditioner_applications: usize,
    pub unconverged_inner_solves: usize,
    pub max_inner_true_residual: f64,
    pub setup_time: f64,
    pub solve_time: f64,
    pub final_residual: f64,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub cells: Vec<CellRecord>,
}

impl ExperimentReport {
    /// Sorts cells by `(strategy, inner_tol, ppwl, k, N)`.
    pub fn sort(&mut self) {
        self.cells.sort_by(|a, b| {
            (a.strategy, a.ppwl, a.n_glob, a.n_subdomains)
                .cmp(&(b.strategy, b.ppwl, b.n_glob, b.n_subdomains))
                .then(
                    b.inner_tol
                        .unwrap_or(0.0)
                        .total_cmp(&a.inner_tol.unwrap_or(0.0)),
                )
                .then(a.k.total_cmp(&b.k))
        });
    }

    pub fn find(&self, k: f64, ppwl: u32, n: usize) -> Option<&CellRecord> {
        self.cells
            .iter()
            .find(|c| c.k == k && c.ppwl == Some(ppwl) && c.n_subdomains == n)
    }

    pub fn all_converged(&self) -> bool {
        self.cells.iter().all(|c| c.converged && c.error.is_none())
    }
}

/// Assemble, partition, build RAS, run FGMRES from a zero initial guess.
pub fn run_cell(
    k: f64,
    n_glob: usize,
    n_subdomains: usize,
    strategy: SubdomainStrategy,
    outer: &SolverConfig,
    overlap: usize,
    rhs_scale: f64,
) -> Result<CellRecord> {
    let grid = build_grid(k, n_glob)?;
    let a = assemble_matrix::<f64>(&grid);
    let mut f = assemble_rhs::<f64>(&grid);
    f.iter_mut().for_each(|v| *v *= rhs_scale);
    let partition = build_partition(&grid, n_subdomains, overlap)?;
    let ras = build_ras(&a, &partition, strategy)?;

    let started = Instant::now();
    let (_, report) = fgmres(
        |x: &[f64], y: &mut [f64]| a.mul_vec_into(x, y),
        |r: &[f64], z: &mut [f64]| ras.apply_into(r, z),
        &f,
        &vec![0.0; f.len()],
        outer,
    )?;
    let solve_time = started.elapsed().as_secs_f64();
    let stats = ras.stats();
    let iterative = strategy.kind() != StrategyKind::Direct;
    Ok(CellRecord {
        k,
        n_glob,
        n_subdomains,
        ppwl: None,
        n_ppwl: grid.n_ppwl,
        strategy: strategy.kind(),
        inner_tol: strategy.inner_tol(),
        outer_iterations: report.iterations,
        avg_inner_iterations: if iterative { stats.average_inner() } else { None },
        total_inner_iterations: stats.total_inner,
        subdomain_solve_count: stats.total_solves,
        preconditioner_applications: stats.applications,
        unconverged_inner_solves: stats.unconverged_solves,
        max_inner_true_residual: stats.max_true_rel_residual,
        setup_time: ras.setup_time(),
        solve_time,
        final_residual: report.final_true_relative_residual,
        converged: report.converged,
        error: None,
    })
}

fn failed_cell(cfg: &ExperimentConfig, k: f64, n_glob: usize, n: usize, err: &Error) -> CellRecord {
    CellRecord {
        k,
        n_glob,
        n_subdomains: n,
        ppwl: cfg.resolution.ppwl_label(),
        n_ppwl: f64::NAN,
        strategy: cfg.strategy,
        inner_tol: (cfg.strategy != StrategyKind::Direct).then_some(cfg.inner_tol),
        outer_iterations: 0,
        avg_inner_iterations: None,
        total_inner_iterations: 0,
        subdomain_solve_count: 0,
        preconditioner_applications: 0,
        unconverged_inner_solves: 0,
        max_inner_true_residual: 0.0,
        setup_time: 0.0,
        solve_time: 0.0,
        final_residual: f64::NAN,
        converged: false,
        error: Some(err.to_string()),
    }
}

/// Runs every `(k, N)` cell; per-cell failures are recorded, not fatal.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.outer.validate()?;
    let strategy = SubdomainStrategy::inexact(cfg.strategy, cfg.inner_tol)?;
    let mut jobs = Vec::new();
    for &k in &cfg.ks {
        let n_glob = cfg.resolution.n_glob(k)?;
        for &n in &cfg.subdomains {
            jobs.push((k, n_glob, n));
        }
    }
    let cells = jobs
        .into_par_iter()
        .map(|(k, n_glob, n)| {
            match run_cell(k, n_glob, n, strategy, &cfg.outer, cfg.overlap, cfg.rhs_scale) {
                Ok(mut cell) => {
                    cell.ppwl = cfg.resolution.ppwl_label();
                    cell
                }
                Err(err) => failed_cell(cfg, k, n_glob, n, &err),
            }
        })
        .collect();
    let mut report = ExperimentReport { cells };
    report.sort();
    Ok(report)
}

//! One-level restricted additive Schwarz, `M⁻¹ = Σ_j R_jᵀ D_j A_j⁻¹ R_j`,
//! with a pluggable subdomain solver.

use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{extract_local_matrix, LocalSystem, Partition};
use crate::deflation::{solve_deflated, DeflationContext};
use crate::error::{check_dim, Result};
use crate::krylov::{gmres, SolverConfig};
use crate::linalg::{BandedLu, CsrMatrix, Ilu0Factors};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Direct,
    Deflation,
    Ilu0,
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Direct => "direct",
            StrategyKind::Deflation => "deflation",
            StrategyKind::Ilu0 => "ilu0",
        }
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "direct" | "lu" => Ok(StrategyKind::Direct),
            "deflation" | "deflated" => Ok(StrategyKind::Deflation),
            "ilu0" | "ilu" => Ok(StrategyKind::Ilu0),
            other => Err(format!("unknown strategy `{other}` (direct, deflation, ilu0)")),
        }
    }
}

/// How each subdomain system is solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubdomainStrategy {
    /// Banded LU.
    Direct,
    /// GMRES with two-level deflation; falls back to LU on boxes below 4 nodes per side.
    Deflation(SolverConfig),
    /// Right-preconditioned GMRES with ILU(0).
    Ilu0(SolverConfig),
}

impl SubdomainStrategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            SubdomainStrategy::Direct => StrategyKind::Direct,
            SubdomainStrategy::Deflation(_) => StrategyKind::Deflation,
            SubdomainStrategy::Ilu0(_) => StrategyKind::Ilu0,
        }
    }

    /// Inner solver config with the default cap of `10 x` local dimension.
    pub fn inexact(kind: StrategyKind, rel_tol: f64) -> Result<Self> {
        let cfg = SolverConfig::new(rel_tol, usize::MAX)?;
        Ok(match kind {
            StrategyKind::Direct => SubdomainStrategy::Direct,
            StrategyKind::Deflation => SubdomainStrategy::Deflation(cfg),
            StrategyKind::Ilu0 => SubdomainStrategy::Ilu0(cfg),
        })
    }

    pub fn inner_tol(&self) -> Option<f64> {
        match self {
            SubdomainStrategy::Direct => None,
            SubdomainStrategy::Deflation(c) | SubdomainStrategy::Ilu0(c) => Some(c.rel_tol),
        }
    }
}

#[derive(Debug)]
enum LocalSolver<T> {
    Direct(BandedLu<T>),
    Deflation {
        matrix: CsrMatrix<T>,
        ctx: Box<DeflationContext<T>>,
        cfg: SolverConfig,
    },
    Ilu0 {
        matrix: CsrMatrix<T>,
        factors: Ilu0Factors<T>,
        cfg: SolverConfig,
    },
}

/// Outcome of one subdomain solve.
#[derive(Debug, Clone, Copy, Default)]
struct LocalOutcome {
    iterations: usize,
    converged: bool,
    true_rel_residual: f64,
    iterative: bool,
}

/// Running totals over every subdomain solve since construction (or reset).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct InnerStats {
    pub applications: usize,
    pub total_inner: usize,
    pub total_solves: usize,
    pub unconverged_solves: usize,
    /// Largest `‖A_j u_j - f_j‖ / ‖f_j‖` over the iterative solves.
    pub max_true_rel_residual: f64,
}

impl InnerStats {
    /// Average inner iterations per subdomain solve, rounded to nearest.
    pub fn average_inner(&self) -> Option<usize> {
        (self.total_solves > 0)
            .then(|| (self.total_inner as f64 / self.total_solves as f64).round() as usize)
    }
}

/// `z = Σ_j R_jᵀ D_j solve_j(R_j r)`.
#[derive(Debug)]
pub struct RasPreconditioner<T> {
    partition: Partition,
    strategy: SubdomainStrategy,
    solvers: Vec<LocalSolver<T>>,
    stats: Mutex<InnerStats>,
    setup_time: f64,
}

/// Prepares every subdomain solver eagerly.
pub fn build_ras<T: Scalar>(
    a: &CsrMatrix<T>,
    partition: &Partition,
    strategy: SubdomainStrategy,
) -> Result<RasPreconditioner<T>> {
    check_dim("RAS: matrix vs partition", partition.n_dofs(), a.n_rows())?;
    let started = Instant::now();
    let locals: Vec<LocalSystem<T>> = (0..partition.n_subdomains)
        .map(|j| extract_local_matrix(a, partition, j))
        .collect();
    let solvers = locals
        .into_par_iter()
        .map(|local| prepare(local, strategy))
        .collect::<Result<Vec<_>>>()?;
    Ok(RasPreconditioner {
        partition: partition.clone(),
        strategy,
        solvers,
        stats: Mutex::new(InnerStats::default()),
        setup_time: started.elapsed().as_secs_f64(),
    })
}

fn capped(cfg: SolverConfig, n_local: usize) -> SolverConfig {
    SolverConfig {
        max_iterations: cfg.max_iterations.min(10 * n_local.max(1)),
        ..cfg
    }
}

fn prepare<T: Scalar>(local: LocalSystem<T>, strategy: SubdomainStrategy) -> Result<LocalSolver<T>> {
    let id = local.id;
    let direct = |m: &CsrMatrix<T>| {
        BandedLu::factor(m)
            .map(LocalSolver::Direct)
            .map_err(|e| e.in_subdomain(id))
    };
    match strategy {
        SubdomainStrategy::Direct => direct(&local.matrix),
        SubdomainStrategy::Deflation(cfg) => {
            if local.nx < 4 || local.ny < 4 {
                return direct(&local.matrix);
            }
            let ctx = DeflationContext::build(&local)?;
            let cfg = capped(cfg, local.matrix.n_rows());
            Ok(LocalSolver::Deflation {
                matrix: local.matrix,
                ctx: Box::new(ctx),
                cfg,
            })
        }
        SubdomainStrategy::Ilu0(cfg) => {
            let factors = Ilu0Factors::factor(&local.matrix).map_err(|e| e.in_subdomain(id))?;
            let cfg = capped(cfg, local.matrix.n_rows());
            Ok(LocalSolver::Ilu0 {
                matrix: local.matrix,
                factors,
                cfg,
            })
        }
    }
}

impl<T: Scalar> LocalSolver<T> {
    fn solve(&self, f: &[T]) -> Result<(Vec<T>, LocalOutcome)> {
        match self {
            LocalSolver::Direct(lu) => {
                let mut u = f.to_vec();
                lu.solve_in_place(&mut u);
                Ok((
                    u,
                    LocalOutcome {
                        converged: true,
                        ..LocalOutcome::default()
                    },
                ))
            }
            LocalSolver::Deflation { matrix, ctx, cfg } => {
                let (u, rep) = solve_deflated(ctx, matrix, f, cfg)?;
                Ok((u, outcome(&rep)))
            }
            LocalSolver::Ilu0 {
                matrix,
                factors,
                cfg,
            } => {
                let op = |x: &[T], y: &mut [T]| matrix.mul_vec_into(x, y);
                let prec = |x: &[T], y: &mut [T]| factors.apply_into(x, y);
                let (u, rep) = gmres(op, prec, f, &vec![T::zero(); f.len()], cfg)?;
                Ok((u, outcome(&rep)))
            }
        }
    }
}

fn outcome(rep: &crate::krylov::SolveReport) -> LocalOutcome {
    LocalOutcome {
        iterations: rep.iterations,
        converged: rep.converged,
        true_rel_residual: rep.final_true_relative_residual,
        iterative: true,
    }
}

impl<T: Scalar> RasPreconditioner<T> {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn strategy(&self) -> SubdomainStrategy {
        self.strategy
    }

    /// Seconds spent preparing subdomain solvers.
    pub fn setup_time(&self) -> f64 {
        self.setup_time
    }

    pub fn n_subdomains(&self) -> usize {
        self.solvers.len()
    }

    /// Local dimension of each subdomain system.
    pub fn local_dims(&self) -> Vec<usize> {
        self.partition.subdomains.iter().map(|s| s.n_local()).collect()
    }

    /// True when subdomain `j` uses the direct fallback.
    pub fn is_direct(&self, j: usize) -> bool {
        matches!(self.solvers[j], LocalSolver::Direct(_))
    }

    pub fn stats(&self) -> InnerStats {
        *self.stats.lock().expect("stats lock")
    }

    pub fn reset_stats(&self) {
        *self.stats.lock().expect("stats lock") = InnerStats::default();
    }

    /// Applies the preconditioner, scattering subdomains in ascending order.
    pub fn apply(&self, r: &[T]) -> Result<Vec<T>> {
        let order: Vec<usize> = (0..self.solvers.len()).collect();
        self.apply_ordered(r, &order)
    }

    /// Applies the preconditioner with the scatter performed in `order`.
    pub fn apply_ordered(&self, r: &[T], order: &[usize]) -> Result<Vec<T>> {
        check_dim("RAS apply: residual", self.partition.n_dofs(), r.len())?;
        let locals = order
            .par_iter()
            .map(|&j| {
                let rj = self.partition.restrict(j, r)?;
                self.solvers[j].solve(&rj)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut z = vec![T::zero(); r.len()];
        let mut stats = self.stats.lock().expect("stats lock");
        stats.applications += 1;
        for (&j, (uj, out)) in order.iter().zip(&locals) {
            self.partition.prolong_weighted_into(j, uj, &mut z)?;
            stats.total_solves += 1;
            stats.total_inner += out.iterations;
            if out.iterative {
                stats.unconverged_solves += usize::from(!out.converged);
                stats.max_true_rel_residual = stats.max_true_rel_residual.max(out.true_rel_residual);
            }
        }
        Ok(z)
    }

    /// Callback form for Krylov solvers.
    pub fn apply_into(&self, r: &[T], z: &mut [T]) {
        let out = self.apply(r).expect("RAS apply on a conforming residual");
        z.copy_from_slice(&out);
    }
}

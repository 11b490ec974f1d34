//! Overlapping Cartesian decomposition of the interior grid.
//!
//! The grid is tiled by `p x p` owned boxes (`N = p²`); each box is dilated
//! by `overlap` node layers and clipped to the grid. Subdomain `j` sits at
//! block `(j % p, j / p)`. Ownership masks are Boolean, so
//! `Σ_j R_jᵀ D_j R_j = I` holds exactly.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::grid_fem::GridSpec;
use crate::linalg::CsrMatrix;
use crate::scalar::Scalar;

/// Inclusive 0-based node range along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AxisRange {
    pub start: usize,
    pub end: usize,
}

impl AxisRange {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.start..=self.end).contains(&i)
    }

    pub fn iter(&self) -> RangeInclusive<usize> {
        self.start..=self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subdomain {
    pub id: usize,
    pub owned_x: AxisRange,
    pub owned_y: AxisRange,
    pub x: AxisRange,
    pub y: AxisRange,
    /// Global indices of the overlapped box in local lexicographic order.
    #[serde(skip)]
    pub indices: Vec<usize>,
    /// One flag per local index: true where this subdomain owns the node.
    #[serde(skip)]
    pub owned: Vec<bool>,
}

impl Subdomain {
    pub fn n_local(&self) -> usize {
        self.indices.len()
    }

    /// Local sizes `(n_jx, n_jy)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub n_glob: usize,
    pub n_subdomains: usize,
    pub per_axis: usize,
    pub overlap: usize,
    /// Owned block boundaries along one axis (same for x and y).
    pub blocks: Vec<AxisRange>,
    pub subdomains: Vec<Subdomain>,
}

/// Per-axis owned blocks: sizes differ by at most one, larger blocks first.
fn axis_blocks(n: usize, parts: usize) -> Vec<AxisRange> {
    let base = n / parts;
    let extra = n % parts;
    let mut start = 0;
    (0..parts)
        .map(|b| {
            let len = base + usize::from(b < extra);
            let r = AxisRange {
                start,
                end: start + len - 1,
            };
            start += len;
            r
        })
        .collect()
}

fn dilate(r: AxisRange, overlap: usize, n: usize) -> AxisRange {
    AxisRange {
        start: r.start.saturating_sub(overlap),
        end: (r.end + overlap).min(n - 1),
    }
}

pub fn build_partition(grid: &GridSpec, n_subdomains: usize, overlap: usize) -> Result<Partition> {
    let per_axis = (n_subdomains as f64).sqrt().round() as usize;
    if per_axis == 0 || per_axis * per_axis != n_subdomains {
        return Err(Error::NotPerfectSquare(n_subdomains));
    }
    let n = grid.n_glob;
    let smallest = n / per_axis;
    if smallest < 2 {
        return Err(Error::BlockTooSmall { size: smallest });
    }
    let blocks = axis_blocks(n, per_axis);
    let mut subdomains = Vec::with_capacity(n_subdomains);
    for by in 0..per_axis {
        for bx in 0..per_axis {
            let (owned_x, owned_y) = (blocks[bx], blocks[by]);
            let (x, y) = (dilate(owned_x, overlap, n), dilate(owned_y, overlap, n));
            let mut indices = Vec::with_capacity(x.len() * y.len());
            let mut owned = Vec::with_capacity(x.len() * y.len());
            for iy in y.iter() {
                for ix in x.iter() {
                    indices.push(grid.index(ix, iy));
                    owned.push(owned_x.contains(ix) && owned_y.contains(iy));
                }
            }
            subdomains.push(Subdomain {
                id: by * per_axis + bx,
                owned_x,
                owned_y,
                x,
                y,
                indices,
                owned,
            });
        }
    }
    Ok(Partition {
        n_glob: n,
        n_subdomains,
        per_axis,
        overlap,
        blocks,
        subdomains,
    })
}

impl Partition {
    pub fn n_dofs(&self) -> usize {
        self.n_glob * self.n_glob
    }

    pub fn subdomain(&self, j: usize) -> &Subdomain {
        &self.subdomains[j]
    }

    /// `R_j v`: gathers the overlapped box in local order.
    pub fn restrict<T: Scalar>(&self, j: usize, v: &[T]) -> Result<Vec<T>> {
        check_dim("restrict: global vector", self.n_dofs(), v.len())?;
        Ok(self.subdomains[j].indices.iter().map(|&g| v[g]).collect())
    }

    /// `R_jᵀ D_j v_j` into a fresh zero global vector.
    pub fn prolong_weighted<T: Scalar>(&self, j: usize, v_j: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.n_dofs()];
        self.prolong_weighted_into(j, v_j, &mut out)?;
        Ok(out)
    }

    /// Writes the owned entries of `v_j` into `out`; other entries are left untouched.
    pub fn prolong_weighted_into<T: Scalar>(&self, j: usize, v_j: &[T], out: &mut [T]) -> Result<()> {
        let sd = &self.subdomains[j];
        check_dim("prolong: local vector", sd.n_local(), v_j.len())?;
        check_dim("prolong: global vector", self.n_dofs(), out.len())?;
        for ((&g, &own), &v) in sd.indices.iter().zip(&sd.owned).zip(v_j) {
            if own {
                out[g] = v;
            }
        }
        Ok(())
    }

    /// Ownership count per global DOF (all ones for a valid partition).
    pub fn ownership_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_dofs()];
        for sd in &self.subdomains {
            for (&g, &own) in sd.indices.iter().zip(&sd.owned) {
                counts[g] += usize::from(own);
            }
        }
        counts
    }

    /// Number of overlapped boxes containing each global DOF.
    pub fn coverage_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_dofs()];
        for sd in &self.subdomains {
            for &g in &sd.indices {
                counts[g] += 1;
            }
        }
        counts
    }

    /// Line-oriented text dump of boxes and ownership (1-based node ranges).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "partition n_glob={} N={} per_axis={} overlap={}",
            self.n_glob, self.n_subdomains, self.per_axis, self.overlap
        );
        for sd in &self.subdomains {
            let _ = writeln!(
                out,
                "subdomain {} owned x={}..{} y={}..{} box x={}..{} y={}..{} size={}x{} owned_dofs={}",
                sd.id,
                sd.owned_x.start + 1,
                sd.owned_x.end + 1,
                sd.owned_y.start + 1,
                sd.owned_y.end + 1,
                sd.x.start + 1,
                sd.x.end + 1,
                sd.y.start + 1,
                sd.y.end + 1,
                sd.x.len(),
                sd.y.len(),
                sd.owned.iter().filter(|&&o| o).count()
            );
        }
        out
    }
}

/// Local Dirichlet matrix `A_j = R_j A R_jᵀ` with its box shape.
#[derive(Debug, Clone)]
pub struct LocalSystem<T> {
    pub id: usize,
    pub matrix: CsrMatrix<T>,
    pub nx: usize,
    pub ny: usize,
}

pub fn extract_local_matrix<T: Scalar>(a: &CsrMatrix<T>, p: &Partition, j: usize) -> LocalSystem<T> {
    let sd = &p.subdomains[j];
    let (nx, ny) = sd.shape();
    LocalSystem {
        id: j,
        matrix: a.principal_submatrix(&sd.indices),
        nx,
        ny,
    }
}

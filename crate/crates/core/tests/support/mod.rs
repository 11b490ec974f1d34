//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use hsolve::linalg::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Plain triple-loop matvec.
pub fn dense_mul_vec(a: &DenseMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..a.n_rows())
        .map(|i| (0..a.n_cols()).map(|j| a.get(i, j) * x[j]).sum())
        .collect()
}

pub fn dense_matmul(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(a.n_rows(), b.n_cols(), |i, j| {
        (0..a.n_cols()).map(|l| a.get(i, l) * b.get(l, j)).sum()
    })
}

pub fn dense_transpose(a: &DenseMatrix<f64>) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(a.n_cols(), a.n_rows(), |i, j| a.get(j, i))
}

/// P1 element-loop assembly of `K - k² M` on the unit square.
///
/// Every cell is cut along its lower-left to upper-right diagonal. Assembly
/// runs over all `(n+2)²` nodes; the boundary rows and columns are dropped
/// at the end, which is exactly homogeneous Dirichlet elimination.
///
/// Elements are integrated in grid units: P1 stiffness is scale free in 2D
/// and the mass matrix scales with `h²`, accumulated as integer multiples of
/// `area / 12 = 1/24`. Only the final combination rounds.
pub fn element_assembly(k: f64, n_glob: usize) -> DenseMatrix<f64> {
    let m = n_glob + 2;
    let mut stiffness = vec![vec![0.0; m * m]; m * m];
    let mut mass_24ths = vec![vec![0i64; m * m]; m * m];
    let node = |ix: usize, iy: usize| iy * m + ix;
    let coords = |id: usize| ((id % m) as f64, (id / m) as f64);

    for cy in 0..m - 1 {
        for cx in 0..m - 1 {
            let ll = node(cx, cy);
            let lr = node(cx + 1, cy);
            let ur = node(cx + 1, cy + 1);
            let ul = node(cx, cy + 1);
            for tri in [[ll, lr, ur], [ll, ur, ul]] {
                let p: Vec<(f64, f64)> = tri.iter().map(|&v| coords(v)).collect();
                let det = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[2].0 - p[0].0) * (p[1].1 - p[0].1);
                let area = 0.5 * det.abs();
                assert_eq!(area, 0.5);
                // barycentric gradients times 2·area
                let b = [p[1].1 - p[2].1, p[2].1 - p[0].1, p[0].1 - p[1].1];
                let c = [p[2].0 - p[1].0, p[0].0 - p[2].0, p[1].0 - p[0].0];
                for a in 0..3 {
                    for e in 0..3 {
                        stiffness[tri[a]][tri[e]] += (b[a] * b[e] + c[a] * c[e]) / (4.0 * area);
                        mass_24ths[tri[a]][tri[e]] += if a == e { 2 } else { 1 };
                    }
                }
            }
        }
    }

    let h2 = 1.0 / ((n_glob + 1) * (n_glob + 1)) as f64;
    let k2h2 = k * k * h2;
    let interior: Vec<usize> = (1..=n_glob)
        .flat_map(|iy| (1..=n_glob).map(move |ix| node(ix, iy)))
        .collect();
    DenseMatrix::from_fn(interior.len(), interior.len(), |i, j| {
        let (p, q) = (interior[i], interior[j]);
        stiffness[p][q] - k2h2 * mass_24ths[p][q] as f64 / 24.0
    })
}

/// Index of the interior node closest to (0.5, 0.5), ties toward lower indices.
pub fn nearest_centre_node(n_glob: usize) -> usize {
    let h = 1.0 / (n_glob + 1) as f64;
    let mut best = (f64::INFINITY, 0);
    for iy in 0..n_glob {
        for ix in 0..n_glob {
            let dx = (ix + 1) as f64 * h - 0.5;
            let dy = (iy + 1) as f64 * h - 0.5;
            let d = dx * dx + dy * dy;
            // strict comparison keeps the first (lowest-index) of equidistant nodes
            if d < best.0 - 1e-12 {
                best = (d, iy * n_glob + ix);
            }
        }
    }
    best.1
}

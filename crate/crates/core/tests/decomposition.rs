mod support;

use hsolve::decomposition::{build_partition, extract_local_matrix, AxisRange};
use hsolve::grid_fem::{assemble_matrix, build_grid};
use hsolve::Error;
use proptest::prelude::*;
use support::{random_vec, rng};

fn r(start: usize, end: usize) -> AxisRange {
    AxisRange { start, end }
}

#[test]
fn thirty_nodes_four_subdomains() {
    let p = build_partition(&build_grid(20.0, 30).unwrap(), 4, 1).unwrap();
    assert_eq!(p.blocks, vec![r(0, 14), r(15, 29)]);
    let xs: Vec<AxisRange> = p.subdomains.iter().map(|s| s.x).collect();
    assert_eq!(xs, vec![r(0, 15), r(14, 29), r(0, 15), r(14, 29)]);
    assert!(p.subdomains.iter().all(|s| s.shape() == (16, 16)));
}

#[test]
fn thirty_nodes_nine_subdomains() {
    let p = build_partition(&build_grid(20.0, 30).unwrap(), 9, 1).unwrap();
    assert_eq!(p.blocks, vec![r(0, 9), r(10, 19), r(20, 29)]);
    assert_eq!(p.subdomains[4].shape(), (12, 12));
    // edge-touching boxes are rectangular, corners square
    assert_eq!(p.subdomains[1].shape(), (12, 11));
    assert_eq!(p.subdomains[3].shape(), (11, 12));
    assert_eq!(p.subdomains[0].shape(), (11, 11));
}

#[test]
fn uneven_blocks_put_larger_first() {
    let p = build_partition(&build_grid(1.0, 11).unwrap(), 9, 1).unwrap();
    assert_eq!(p.blocks, vec![r(0, 3), r(4, 7), r(8, 10)]);
}

#[test]
fn single_subdomain_is_whole_grid() {
    let grid = build_grid(20.0, 9).unwrap();
    let a = assemble_matrix::<f64>(&grid);
    let p = build_partition(&grid, 1, 1).unwrap();
    let sd = &p.subdomains[0];
    assert_eq!(sd.indices, (0..81).collect::<Vec<_>>());
    assert!(sd.owned.iter().all(|&o| o));
    assert_eq!(extract_local_matrix(&a, &p, 0).matrix, a);
    let v = random_vec(&mut rng(1), 81);
    assert_eq!(p.restrict(0, &v).unwrap(), v);
    assert_eq!(p.prolong_weighted(0, &v).unwrap(), v);
}

#[test]
fn four_by_four_gather_scatter() {
    // blocks {0,1},{2,3}; boxes {0..2},{1..3}
    let p = build_partition(&build_grid(1.0, 4).unwrap(), 4, 1).unwrap();
    let v: Vec<f64> = (0..16).map(|i| i as f64).collect();
    let expect_gather: [&[usize]; 4] = [
        &[0, 1, 2, 4, 5, 6, 8, 9, 10],
        &[1, 2, 3, 5, 6, 7, 9, 10, 11],
        &[4, 5, 6, 8, 9, 10, 12, 13, 14],
        &[5, 6, 7, 9, 10, 11, 13, 14, 15],
    ];
    let expect_owned: [&[usize]; 4] = [&[0, 1, 4, 5], &[2, 3, 6, 7], &[8, 9, 12, 13], &[10, 11, 14, 15]];
    for j in 0..4 {
        let got = p.restrict(j, &v).unwrap();
        let want: Vec<f64> = expect_gather[j].iter().map(|&g| g as f64).collect();
        assert_eq!(got, want, "gather {j}");
        let scattered = p.prolong_weighted(j, &got).unwrap();
        for (g, &s) in scattered.iter().enumerate() {
            let want = if expect_owned[j].contains(&g) { g as f64 } else { 0.0 };
            assert_eq!(s, want, "scatter {j} at {g}");
        }
    }
}

#[test]
fn five_by_five_submatrix_against_dense_indexing() {
    let grid = build_grid(15.0, 5).unwrap();
    let a = assemble_matrix::<f64>(&grid);
    let dense = a.to_dense();
    let p = build_partition(&grid, 4, 1).unwrap();
    // blocks {0,1,2},{3,4}; subdomain 1 box x = 2..4, y = 0..3
    let sd = &p.subdomains[1];
    assert_eq!((sd.x, sd.y), (r(2, 4), r(0, 3)));
    let idx: Vec<usize> = (0..=3).flat_map(|iy| (2..=4).map(move |ix| iy * 5 + ix)).collect();
    assert_eq!(sd.indices, idx);
    let local = extract_local_matrix(&a, &p, 1);
    assert_eq!((local.nx, local.ny), (3, 4));
    for (li, &gi) in idx.iter().enumerate() {
        for (lj, &gj) in idx.iter().enumerate() {
            assert_eq!(local.matrix.get(li, lj), dense.get(gi, gj));
        }
    }
    assert!(local.matrix.is_symmetric());
}

#[test]
fn rejects_bad_counts() {
    let g = build_grid(1.0, 30).unwrap();
    assert!(matches!(build_partition(&g, 8, 1), Err(Error::NotPerfectSquare(8))));
    assert!(matches!(build_partition(&g, 0, 1), Err(Error::NotPerfectSquare(0))));
    let small = build_grid(1.0, 5).unwrap();
    assert!(matches!(build_partition(&small, 9, 1), Err(Error::BlockTooSmall { size: 1 })));
}

#[test]
fn dump_lists_every_subdomain() {
    let p = build_partition(&build_grid(20.0, 30).unwrap(), 4, 1).unwrap();
    let text = p.dump();
    assert!(text.starts_with("partition n_glob=30 N=4 per_axis=2 overlap=1\n"));
    assert!(text.contains("subdomain 1 owned x=16..30 y=1..15 box x=15..30 y=1..16 size=16x16 owned_dofs=225"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn sweep_partitions_are_exact_partitions_of_unity() {
    for n_glob in [30, 60, 120, 240, 480] {
        let g = build_grid(1.0, n_glob).unwrap();
        for n in [1, 4, 9, 16, 25] {
            let p = build_partition(&g, n, 1).unwrap();
            assert!(p.ownership_counts().iter().all(|&c| c == 1), "n_glob={n_glob} N={n}");
            let cover = p.coverage_counts();
            assert!(cover.iter().all(|&c| (1..=4).contains(&c)));
        }
    }
}

proptest! {
    #[test]
    fn restrict_prolong_sum_is_identity(n_glob in 4usize..40, per_axis in 1usize..5, overlap in 0usize..3, seed in 0u64..100) {
        prop_assume!(n_glob / per_axis >= 2);
        let g = build_grid(1.0, n_glob).unwrap();
        let p = build_partition(&g, per_axis * per_axis, overlap).unwrap();
        let v = random_vec(&mut rng(seed), n_glob * n_glob);
        let mut sum = vec![0.0; v.len()];
        for j in 0..p.n_subdomains {
            let back = p.prolong_weighted(j, &p.restrict(j, &v).unwrap()).unwrap();
            for (s, b) in sum.iter_mut().zip(&back) {
                *s += b;
            }
        }
        prop_assert_eq!(sum, v);
        for sd in &p.subdomains {
            prop_assert_eq!(sd.x.start, sd.owned_x.start.saturating_sub(overlap));
            prop_assert_eq!(sd.y.end, (sd.owned_y.end + overlap).min(n_glob - 1));
        }
    }
}

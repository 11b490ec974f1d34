//! Published iteration counts and the sweep presets that reproduce them.

use crate::error::{Error, Result};
use crate::harness::experiment::{ExperimentConfig, Resolution};
use crate::ras::StrategyKind;

pub const WAVE_NUMBERS: [f64; 4] = [20.0, 40.0, 80.0, 160.0];
pub const SUBDOMAINS: [usize; 4] = [4, 9, 16, 25];

/// Outer count and (for inexact solves) average inner count.
pub type Entry = (usize, Option<usize>);

type Grid = [[Entry; 4]; 4];

const fn d(o: usize) -> Entry {
    (o, None)
}

const fn i(o: usize, inner: usize) -> Entry {
    (o, Some(inner))
}

// rows: k = 20, 40, 80, 160; columns: N = 4, 9, 16, 25
const T1_10: Grid = [
    [d(20), d(27), d(48), d(45)],
    [d(31), d(60), d(85), d(101)],
    [d(64), d(133), d(191), d(216)],
    [d(159), d(262), d(365), d(495)],
];
const T1_20: Grid = [
    [d(20), d(40), d(42), d(59)],
    [d(37), d(66), d(89), d(115)],
    [d(76), d(131), d(189), d(255)],
    [d(130), d(289), d(398), d(520)],
];
const T2_10: Grid = [
    [i(20, 23), i(27, 25), i(56, 24), i(46, 21)],
    [i(32, 35), i(62, 29), i(86, 26), i(101, 25)],
    [i(65, 45), i(137, 32), i(192, 32), i(221, 29)],
    [i(160, 63), i(301, 58), i(373, 36), i(518, 33)],
];
const T2_20: Grid = [
    [i(20, 30), i(43, 26), i(42, 25), i(59, 23)],
    [i(37, 31), i(66, 32), i(93, 27), i(112, 27)],
    [i(75, 36), i(132, 30), i(191, 30), i(268, 27)],
    [i(131, 53), i(292, 47), i(407, 31), i(530, 28)],
];
const T3_10: Grid = [
    [i(20, 12), i(27, 14), i(65, 14), i(46, 12)],
    [i(34, 20), i(76, 15), i(95, 14), i(122, 14)],
    [i(72, 26), i(154, 17), i(210, 19), i(262, 17)],
    [i(175, 44), i(301, 40), i(398, 19), i(572, 20)],
];
const T3_20: Grid = [
    [i(20, 15), i(50, 13), i(43, 13), i(59, 12)],
    [i(37, 16), i(76, 18), i(104, 14), i(118, 14)],
    [i(86, 19), i(148, 16), i(218, 16), i(314, 14)],
    [i(144, 34), i(308, 31), i(431, 16), i(555, 15)],
];
const T4_10: Grid = [
    [i(20, 5), i(27, 6), i(73, 7), i(50, 5)],
    [i(42, 8), i(87, 7), i(109, 7), i(126, 6)],
    [i(84, 13), i(172, 8), i(241, 10), i(298, 8)],
    [i(211, 30), i(332, 22), i(451, 9), i(1007, 8)],
];
const T4_20: Grid = [
    [i(21, 7), i(59, 5), i(49, 5), i(72, 5)],
    [i(44, 7), i(84, 8), i(124, 6), i(134, 6)],
    [i(94, 9), i(154, 7), i(229, 8), i(333, 6)],
    [i(154, 20), i(327, 19), i(450, 7), i(584, 6)],
];
const T5_10: Grid = [
    [i(28, 21), i(42, 12), i(74, 10), i(53, 7)],
    [i(44, 64), i(80, 36), i(110, 25), i(131, 17)],
    [i(89, 250), i(177, 121), i(239, 83), i(303, 55)],
    [i(221, 983), i(344, 502), i(475, 260), i(658, 199)],
];

/// One published table: subdomain solver, inner tolerance, resolutions covered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSpec {
    pub table: u8,
    pub strategy: StrategyKind,
    pub inner_tol: Option<f64>,
    pub ppwl: &'static [u32],
}

pub fn table_spec(table: u8) -> Result<TableSpec> {
    let (strategy, inner_tol, ppwl): (_, _, &'static [u32]) = match table {
        1 => (StrategyKind::Direct, None, &[10, 20]),
        2 => (StrategyKind::Deflation, Some(1e-10), &[10, 20]),
        3 => (StrategyKind::Deflation, Some(1e-5), &[10, 20]),
        4 => (StrategyKind::Deflation, Some(1e-2), &[10, 20]),
        5 => (StrategyKind::Ilu0, Some(1e-2), &[10]),
        other => {
            return Err(Error::InvalidConfig(format!(
                "table must be between 1 and 5, got {other}"
            )))
        }
    };
    Ok(TableSpec {
        table,
        strategy,
        inner_tol,
        ppwl,
    })
}

/// Published value for a cell, if the table lists it.
pub fn published(table: u8, ppwl: u32, k: f64, n_subdomains: usize) -> Option<Entry> {
    let grid = match (table, ppwl) {
        (1, 10) => &T1_10,
        (1, 20) => &T1_20,
        (2, 10) => &T2_10,
        (2, 20) => &T2_20,
        (3, 10) => &T3_10,
        (3, 20) => &T3_20,
        (4, 10) => &T4_10,
        (4, 20) => &T4_20,
        (5, 10) => &T5_10,
        _ => return None,
    };
    let row = WAVE_NUMBERS.iter().position(|&w| w == k)?;
    let col = SUBDOMAINS.iter().position(|&n| n == n_subdomains)?;
    Some(grid[row][col])
}

/// Sweep configurations (one per resolution) for a table, wave numbers capped at `max_k`.
pub fn table_preset(table: u8, max_k: f64) -> Result<Vec<ExperimentConfig>> {
    let spec = table_spec(table)?;
    let ks: Vec<f64> = WAVE_NUMBERS.iter().copied().filter(|&k| k <= max_k).collect();
    if ks.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "max-k {max_k} excludes every wave number of table {table}"
        )));
    }
    Ok(spec
        .ppwl
        .iter()
        .map(|&p| {
            let cfg = ExperimentConfig::new(ks.clone(), Resolution::Ppwl(p), SUBDOMAINS.to_vec(), spec.strategy);
            match spec.inner_tol {
                Some(tol) => cfg.with_inner_tol(tol),
                None => cfg,
            }
        })
        .collect())
}

/// `|ours - published| <= max(3, 15% of published)`.
pub fn within_tolerance(ours: usize, published: usize) -> bool {
    let slack = 3.0f64.max(0.15 * published as f64);
    (ours as f64 - published as f64).abs() <= slack
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        assert_eq!(published(1, 10, 20.0, 4), Some((20, None)));
        assert_eq!(published(2, 10, 40.0, 9), Some((62, Some(29))));
        assert_eq!(published(4, 20, 160.0, 25), Some((584, Some(6))));
        assert_eq!(published(5, 10, 80.0, 16), Some((239, Some(83))));
        assert_eq!(published(5, 20, 80.0, 16), None);
        assert_eq!(published(1, 10, 30.0, 4), None);
    }

    #[test]
    fn preset_sizes() {
        let cfgs = table_preset(1, 40.0).unwrap();
        let cells: usize = cfgs.iter().map(|c| c.ks.len() * c.subdomains.len()).sum();
        assert_eq!(cells, 16);
        assert_eq!(table_preset(5, 80.0).unwrap().len(), 1);
        assert!(table_preset(6, 80.0).is_err());
        assert!(table_preset(1, 10.0).is_err());
    }

    #[test]
    fn tolerance_band() {
        assert!(within_tolerance(17, 20));
        assert!(!within_tolerance(16, 20));
        assert!(within_tolerance(114, 133));
        assert!(!within_tolerance(113, 133));
    }
}

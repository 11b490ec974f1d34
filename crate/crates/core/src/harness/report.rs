//! Text, CSV and JSON renderings of an experiment report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::experiment::{CellRecord, ExperimentReport};
use crate::harness::reference;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (text, csv, json)")),
        }
    }
}

pub const CSV_HEADER: &str =
    "k,n_glob,N,ppwl,strategy,inner_tol,outer_iters,avg_inner,total_inner,solves,converged,setup_s,solve_s,final_rel_res";

pub fn emit_table(report: &ExperimentReport, format: Format) -> Result<String> {
    if report.cells.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut sorted = report.clone();
    sorted.sort();
    Ok(match format {
        Format::Text => text(&sorted),
        Format::Csv => csv(&sorted),
        Format::Json => serde_json::to_string_pretty(&sorted).expect("report serialises"),
    })
}

/// Renders and writes to `path`.
pub fn write_table(report: &ExperimentReport, format: Format, path: &Path) -> Result<()> {
    let body = emit_table(report, format)?;
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Table cell text: `outer` for direct solves, `outer (avg_inner)` otherwise.
pub fn cell_text(cell: &CellRecord) -> String {
    if cell.error.is_some() {
        return "error".into();
    }
    let mark = if cell.converged { "" } else { "*" };
    match cell.avg_inner_iterations {
        Some(inner) => format!("{}{mark} ({inner})", cell.outer_iterations),
        None => format!("{}{mark}", cell.outer_iterations),
    }
}

fn ppwl_text(cell: &CellRecord) -> String {
    match cell.ppwl {
        Some(p) => p.to_string(),
        None => format!("{:.2}", cell.n_ppwl),
    }
}

fn tol_text(tol: Option<f64>) -> String {
    tol.map(|t| format!("{t:e}")).unwrap_or_default()
}

fn text(report: &ExperimentReport) -> String {
    type Key = (String, String, String);
    let mut groups: BTreeMap<Key, Vec<&CellRecord>> = BTreeMap::new();
    for c in &report.cells {
        let key = (
            c.strategy.name().to_string(),
            tol_text(c.inner_tol),
            ppwl_text(c),
        );
        groups.entry(key).or_default().push(c);
    }

    let mut out = String::new();
    for ((strategy, tol, ppwl), cells) in groups {
        let mut ns: Vec<usize> = cells.iter().map(|c| c.n_subdomains).collect();
        ns.sort_unstable();
        ns.dedup();
        let mut rows: Vec<(f64, usize)> = cells.iter().map(|c| (c.k, c.n_glob)).collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        rows.dedup();

        let tol = if tol.is_empty() { String::new() } else { format!(", inner tol {tol}") };
        let _ = writeln!(out, "{strategy}{tol}, {ppwl} ppwl");
        let mut header = format!("{:>6} {:>6} |", "k", "n_glob");
        for n in &ns {
            let _ = write!(header, " {:>10}", n);
        }
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "{}", "-".repeat(header.chars().count()));
        for (k, n_glob) in rows {
            let mut line = format!("{:>6} {:>6} |", k, n_glob);
            for n in &ns {
                let cell = cells
                    .iter()
                    .find(|c| c.k == k && c.n_glob == n_glob && c.n_subdomains == *n);
                let _ = write!(line, " {:>10}", cell.map(|c| cell_text(c)).unwrap_or_default());
            }
            let _ = writeln!(out, "{line}");
        }
        let _ = writeln!(out);
    }
    out
}

fn csv(report: &ExperimentReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in &report.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{:.3},{:.3},{:.6e}",
            c.k,
            c.n_glob,
            c.n_subdomains,
            ppwl_text(c),
            c.strategy.name(),
            tol_text(c.inner_tol),
            c.outer_iterations,
            c.avg_inner_iterations.map(|v| v.to_string()).unwrap_or_default(),
            c.total_inner_iterations,
            c.subdomain_solve_count,
            c.converged,
            c.setup_time,
            c.solve_time,
            c.final_residual,
        );
    }
    out
}

/// Side-by-side listing against a published table.
pub fn comparison(report: &ExperimentReport, table: u8) -> String {
    let mut out = format!("comparison with published table {table} (band: max(3, 15%))\n");
    for c in &report.cells {
        let Some(ppwl) = c.ppwl else { continue };
        let Some((outer, inner)) = reference::published(table, ppwl, c.k, c.n_subdomains) else {
            continue;
        };
        let published = match inner {
            Some(v) => format!("{outer} ({v})"),
            None => outer.to_string(),
        };
        let verdict = if reference::within_tolerance(c.outer_iterations, outer) {
            "within"
        } else {
            "outside"
        };
        let _ = writeln!(
            out,
            "k={:<4} ppwl={:<3} N={:<3} ours {:>12}  published {:>12}  {verdict}",
            c.k,
            ppwl,
            c.n_subdomains,
            cell_text(c),
            published
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ras::StrategyKind;

    fn cell(strategy: StrategyKind, outer: usize, inner: Option<usize>) -> CellRecord {
        CellRecord {
            k: 20.0,
            n_glob: 30,
            n_subdomains: 4,
            ppwl: Some(10),
            n_ppwl: 9.74,
            strategy,
            inner_tol: inner.map(|_| 1e-10),
            outer_iterations: outer,
            avg_inner_iterations: inner,
            total_inner_iterations: 0,
            subdomain_solve_count: 0,
            preconditioner_applications: 0,
            unconverged_inner_solves: 0,
            max_inner_true_residual: 0.0,
            setup_time: 0.0,
            solve_time: 0.0,
            final_residual: 1e-7,
            converged: true,
            error: None,
        }
    }

    #[test]
    fn direct_cell_has_no_parenthesis() {
        assert_eq!(cell_text(&cell(StrategyKind::Direct, 20, None)), "20");
        assert_eq!(cell_text(&cell(StrategyKind::Deflation, 62, Some(29))), "62 (29)");
    }

    #[test]
    fn empty_report_is_an_error() {
        let empty = ExperimentReport::default();
        assert!(matches!(emit_table(&empty, Format::Csv), Err(Error::EmptyReport)));
    }

    #[test]
    fn csv_header_and_row() {
        let report = ExperimentReport {
            cells: vec![cell(StrategyKind::Deflation, 62, Some(29))],
        };
        let csv = emit_table(&report, Format::Csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("20,30,4,10,deflation,1e-10,62,29,0,0,true,0.000,0.000,1.000000e-7")
        );
    }

    #[test]
    fn text_layout() {
        let report = ExperimentReport {
            cells: vec![cell(StrategyKind::Direct, 20, None)],
        };
        let text = emit_table(&report, Format::Text).unwrap();
        assert!(text.starts_with("direct, 10 ppwl\n"));
        assert!(text.contains("    20     30 |         20"));
    }
}

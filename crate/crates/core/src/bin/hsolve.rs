use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use hsolve::grid_fem::{assemble_matrix, assemble_rhs, build_grid};
use hsolve::harness::{
    comparison, emit_table, parse_config, reference, run_experiment, run_selftest, write_table, ExperimentReport,
    Format, RunSettings,
};
use hsolve::linalg::{write_matrix_market, write_vector_market, Symmetry};
use hsolve::ras::StrategyKind;
use hsolve::Error;

#[derive(Parser)]
#[command(name = "hsolve", version, about = "RAS-preconditioned FGMRES for 2D Helmholtz problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep (k, N) cells from flags and/or a key = value config file.
    Run(RunArgs),
    /// Re-run one of the built-in table presets.
    Reproduce(ReproduceArgs),
    /// Write A (and f) in MatrixMarket coordinate format.
    ExportMatrix(ExportArgs),
    /// Run the quick invariant checks.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// Config file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wave numbers, comma separated.
    #[arg(long, value_delimiter = ',')]
    k: Vec<f64>,
    /// Interior nodes per axis (overrides --ppwl).
    #[arg(long)]
    n_glob: Option<usize>,
    /// Resolution preset: 10 (n_glob = 1.5k) or 20 (n_glob = 3k).
    #[arg(long)]
    ppwl: Option<u32>,
    /// Subdomain counts (perfect squares), comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    subdomains: Vec<usize>,
    /// direct, deflation or ilu0.
    #[arg(long)]
    strategy: Option<StrategyKind>,
    #[arg(long)]
    inner_tol: Option<f64>,
    #[arg(long)]
    outer_tol: Option<f64>,
    #[arg(long)]
    max_outer: Option<usize>,
    /// Outer restart length (default: unrestarted).
    #[arg(long)]
    restart: Option<usize>,
    #[arg(long)]
    overlap: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Stdout format.
    #[arg(long, default_value = "text")]
    format: Format,
    /// Exit nonzero if any cell fails or does not converge.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    table: u8,
    /// Largest wave number to include.
    #[arg(long, default_value_t = 80.0)]
    max_k: f64,
    /// CSV output path (default: table<T>.csv).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Also list each cell against the published value.
    #[arg(long)]
    compare: bool,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    k: f64,
    #[arg(long)]
    n_glob: usize,
    /// Matrix path (default: helmholtz_k<k>_n<n>.mtx).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Right-hand side path (default: matrix path with `_rhs` suffix).
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Write every entry instead of the lower triangle.
    #[arg(long)]
    general: bool,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}\n");
    eprintln!("{}", Cli::command().render_usage());
    ExitCode::from(2)
}

fn configure_threads() {
    let Ok(value) = std::env::var("HSOLVE_THREADS") else { return };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: HSOLVE_THREADS ignored: {e}");
            }
        }
        _ => eprintln!("warning: HSOLVE_THREADS must be a positive integer, got `{value}`"),
    }
}

fn finish(report: &ExperimentReport, strict: bool) -> ExitCode {
    for c in report.cells.iter().filter(|c| c.error.is_some() || !c.converged) {
        eprintln!(
            "cell k={} n_glob={} N={}: {}",
            c.k,
            c.n_glob,
            c.n_subdomains,
            c.error.as_deref().unwrap_or("did not converge")
        );
    }
    if strict && !report.all_converged() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn run(args: RunArgs) -> Result<ExitCode, Error> {
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            match parse_config(&text) {
                Ok(s) => s,
                Err(e) => return Ok(usage_error(format!("{}: {e}", path.display()))),
            }
        }
        None => RunSettings::default(),
    };
    let settings = base.merge(RunSettings {
        k: args.k,
        n_glob: args.n_glob,
        ppwl: args.ppwl,
        subdomains: args.subdomains,
        strategy: args.strategy,
        inner_tol: args.inner_tol,
        outer_tol: args.outer_tol,
        max_outer: args.max_outer,
        restart: args.restart,
        overlap: args.overlap,
        csv: args.csv,
        json: args.json,
        strict: args.strict,
    });
    let cfg = match settings.to_experiment() {
        Ok(cfg) => cfg,
        Err(e) => return Ok(usage_error(e)),
    };
    let report = run_experiment(&cfg)?;
    print!("{}", emit_table(&report, args.format)?);
    if let Some(path) = &settings.csv {
        write_table(&report, Format::Csv, path)?;
    }
    if let Some(path) = &settings.json {
        write_table(&report, Format::Json, path)?;
    }
    Ok(finish(&report, settings.strict))
}

fn reproduce(args: ReproduceArgs) -> Result<ExitCode, Error> {
    let presets = match reference::table_preset(args.table, args.max_k) {
        Ok(p) => p,
        Err(e) => return Ok(usage_error(e)),
    };
    let mut report = ExperimentReport::default();
    for cfg in &presets {
        report.cells.extend(run_experiment(cfg)?.cells);
    }
    report.sort();
    print!("{}", emit_table(&report, Format::Text)?);
    if args.compare {
        print!("{}", comparison(&report, args.table));
    }
    let csv = args
        .csv
        .unwrap_or_else(|| PathBuf::from(format!("table{}.csv", args.table)));
    write_table(&report, Format::Csv, &csv)?;
    eprintln!("wrote {} ({} cells)", csv.display(), report.cells.len());
    if let Some(path) = &args.json {
        write_table(&report, Format::Json, path)?;
    }
    Ok(finish(&report, args.strict))
}

fn export(args: ExportArgs) -> Result<ExitCode, Error> {
    let grid = match build_grid(args.k, args.n_glob) {
        Ok(g) => g,
        Err(e) => return Ok(usage_error(e)),
    };
    let a = assemble_matrix::<f64>(&grid);
    let f = assemble_rhs::<f64>(&grid);
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("helmholtz_k{}_n{}.mtx", args.k, args.n_glob)));
    let rhs = args.rhs.unwrap_or_else(|| {
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        out.with_file_name(format!("{stem}_rhs.mtx"))
    });
    let symmetry = if args.general { Symmetry::General } else { Symmetry::Symmetric };

    let file = File::create(&out).map_err(|e| Error::io(&out, e))?;
    write_matrix_market(&a, symmetry, &mut BufWriter::new(file)).map_err(|e| Error::io(&out, e))?;
    let file = File::create(&rhs).map_err(|e| Error::io(&rhs, e))?;
    write_vector_market(&f, &mut BufWriter::new(file)).map_err(|e| Error::io(&rhs, e))?;
    println!(
        "wrote {} ({} x {}, {} nonzeros) and {}",
        out.display(),
        a.n_rows(),
        a.n_cols(),
        a.nnz(),
        rhs.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn selftest() -> ExitCode {
    let checks = run_selftest();
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag}  {:<42} {}", c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Reproduce(args) => reproduce(args),
        Command::ExportMatrix(args) => export(args),
        Command::Selftest => Ok(selftest()),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}

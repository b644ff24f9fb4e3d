//! `kdefect`: solve, cross-check and benchmark maximum k-defective clique
//! search from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use kdefect::generators::gnp;
use kdefect::harness::{
    dominance_suite, parse_manifest, resolve_dataset, BenchRow, ManifestRow, SolveSummary,
};
use kdefect::oracle::{brute_max_kdc, OracleLimits};
use kdefect::{
    check_solution, parse_labeled, solve, BoundKind, FormatHint, LabeledGraph, SolveOptions,
};

const EXIT_SOLVED: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_OOT: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "kdefect",
    version,
    about = "Exact maximum k-defective clique solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one graph and print a run summary.
    Solve(SolveArgs),
    /// Cross-check the solver against exhaustive search.
    Verify(VerifyArgs),
    /// Run every bound on one graph, or check bound dominance on a random suite.
    BoundsCompare(CompareArgs),
    /// Run the rows of a benchmark manifest and compare against expected optima.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Auto,
    Edges,
    Mtx,
}

impl From<InputFormat> for FormatHint {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Auto => FormatHint::Auto,
            InputFormat::Edges => FormatHint::EdgeList,
            InputFormat::Mtx => FormatHint::MatrixMarket,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct RunFlags {
    /// Missing edges allowed.
    #[arg(long, env = "KDEFECT_K")]
    k: usize,
    #[arg(long, env = "KDEFECT_BOUND", default_value = "pcc", value_parser = parse_bound)]
    bound: BoundKind,
    /// Seconds before the search stops with the best found so far.
    #[arg(long, env = "KDEFECT_TIME_LIMIT", default_value_t = kdefect::DEFAULT_TIME_LIMIT_SECS as f64, value_parser = parse_seconds)]
    time_limit: f64,
    /// Worker threads; node counts are only reproducible with 1.
    #[arg(long, env = "KDEFECT_THREADS", default_value_t = 1)]
    threads: usize,
    #[arg(long, env = "KDEFECT_FORMAT", value_enum, default_value = "json")]
    format: Format,
    #[arg(long, env = "KDEFECT_INPUT_FORMAT", value_enum, default_value = "auto")]
    input_format: InputFormat,
}

impl RunFlags {
    fn options(&self, bound: BoundKind) -> SolveOptions {
        SolveOptions::new(self.k)
            .bound(bound)
            .time_limit(Some(Duration::from_secs_f64(self.time_limit)))
            .threads(self.threads)
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, env = "KDEFECT_GRAPH")]
    graph: PathBuf,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Graph to check; without it, random graphs are generated from --seed.
    #[arg(long, env = "KDEFECT_GRAPH")]
    graph: Option<PathBuf>,
    #[arg(long, env = "KDEFECT_K", default_value_t = 1)]
    k: usize,
    #[arg(long, env = "KDEFECT_SEED", default_value_t = 42)]
    seed: u64,
    /// Random graphs to check.
    #[arg(long, default_value_t = 100)]
    count: usize,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Graph to run; without it, the random dominance suite runs instead.
    #[arg(long, env = "KDEFECT_GRAPH")]
    graph: Option<PathBuf>,
    #[arg(long, env = "KDEFECT_K", default_value_t = 1)]
    k: usize,
    #[arg(long, env = "KDEFECT_TIME_LIMIT", default_value_t = kdefect::DEFAULT_TIME_LIMIT_SECS as f64, value_parser = parse_seconds)]
    time_limit: f64,
    #[arg(long, env = "KDEFECT_SEED", default_value_t = 42)]
    seed: u64,
    /// Random instances in the dominance suite.
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    #[arg(long, env = "KDEFECT_FORMAT", value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Args, Debug)]
struct BenchArgs {
    manifest: PathBuf,
    /// Directory holding the datasets; defaults to the manifest's directory.
    #[arg(long, env = "KDEFECT_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[arg(long, env = "KDEFECT_BOUND", default_value = "pcc", value_parser = parse_bound)]
    bound: BoundKind,
    #[arg(long, env = "KDEFECT_TIME_LIMIT", default_value_t = kdefect::DEFAULT_TIME_LIMIT_SECS as f64, value_parser = parse_seconds)]
    time_limit: f64,
    #[arg(long, env = "KDEFECT_FORMAT", value_enum, default_value = "tsv")]
    format: Format,
    /// Rows solved at once; each row still searches sequentially.
    #[arg(long, env = "KDEFECT_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
}

fn parse_bound(s: &str) -> Result<BoundKind, String> {
    s.parse()
}

fn parse_seconds(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("expected a positive number of seconds, got {s:?}")),
    }
}

/// Errors that map to the usage exit code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn load(path: &Path, hint: FormatHint) -> Result<LabeledGraph> {
    let bytes =
        fs::read(path).map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_labeled(&bytes, hint).map_err(|e| Usage(format!("{}: {e}", path.display())).into())
}

fn graph_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run_solve(args: &SolveArgs) -> Result<u8> {
    let lg = load(&args.graph, args.run.input_format.into())?;
    let report = solve(&lg.graph, &args.run.options(args.run.bound));
    let summary = SolveSummary::from_report(&graph_name(&args.graph), &report, &lg.labels);
    match args.run.format {
        Format::Json => print_json(&summary)?,
        Format::Tsv => {
            println!("{}", BenchRow::TSV_HEADER);
            println!("{}", summary.to_bench_row().to_tsv());
        }
    }
    Ok(if report.complete {
        EXIT_SOLVED
    } else {
        EXIT_OOT
    })
}

#[derive(Serialize)]
struct VerifyOutcome {
    graph: String,
    k: usize,
    oracle: Option<usize>,
    results: Vec<(BoundKind, Option<usize>)>,
    agree: bool,
}

fn all_bounds() -> impl Iterator<Item = BoundKind> {
    std::iter::once(BoundKind::None).chain(BoundKind::ALL)
}

fn verify_graph(name: String, g: &kdefect::Graph, k: usize) -> Result<VerifyOutcome> {
    let limits = OracleLimits::default();
    let oracle = (g.n() <= limits.max_n)
        .then(|| brute_max_kdc(g, k))
        .transpose()?;
    let oracle_opt = oracle.as_ref().map(|s| s.size).filter(|&s| s >= k + 2);
    let mut results = Vec::new();
    for bound in all_bounds() {
        let report = solve(g, &SolveOptions::new(k).bound(bound).time_limit(None));
        check_solution(g, &report.best.vertices, k).context("solver returned an invalid clique")?;
        results.push((bound, report.opt()));
    }
    let first = results[0].1;
    let agree = results.iter().all(|r| r.1 == first) && (oracle.is_none() || first == oracle_opt);
    Ok(VerifyOutcome {
        graph: name,
        k,
        oracle: oracle_opt,
        results,
        agree,
    })
}

fn run_verify(args: &VerifyArgs) -> Result<u8> {
    let outcomes = match &args.graph {
        Some(path) => {
            let lg = load(path, FormatHint::Auto)?;
            vec![verify_graph(graph_name(path), &lg.graph, args.k)?]
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let probabilities = kdefect::harness::EDGE_PROBABILITIES;
            (0..args.count)
                .map(|i| {
                    let n = 4 + i % 11;
                    let g = gnp(n, probabilities[i % probabilities.len()], &mut rng);
                    verify_graph(format!("random-{i}"), &g, args.k)
                })
                .collect::<Result<_>>()?
        }
    };
    let failures = outcomes.iter().filter(|o| !o.agree).count();
    if args.graph.is_some() {
        print_json(&outcomes[0])?;
    } else {
        for o in outcomes.iter().filter(|o| !o.agree) {
            print_json(o)?;
        }
        println!("checked: {} disagreements: {failures}", outcomes.len());
    }
    Ok(if failures == 0 {
        EXIT_SOLVED
    } else {
        EXIT_FAILED
    })
}

fn emit_rows(rows: &[BenchRow], format: Format) -> Result<()> {
    match format {
        Format::Json => print_json(&rows),
        Format::Tsv => {
            println!("{}", BenchRow::TSV_HEADER);
            for r in rows {
                println!("{}", r.to_tsv());
            }
            Ok(())
        }
    }
}

fn run_compare(args: &CompareArgs) -> Result<u8> {
    let Some(path) = &args.graph else {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let report = dominance_suite(&mut rng, args.instances);
        println!("instances: {}", report.instances);
        for (rel, count) in &report.violations {
            println!("{rel}\tviolations: {count}");
        }
        return Ok(if report.total_violations() == 0 {
            EXIT_SOLVED
        } else {
            EXIT_FAILED
        });
    };
    let lg = load(path, FormatHint::Auto)?;
    let name = graph_name(path);
    let mut rows = Vec::new();
    let mut all_complete = true;
    for bound in BoundKind::ALL {
        let opts = SolveOptions::new(args.k)
            .bound(bound)
            .time_limit(Some(Duration::from_secs_f64(args.time_limit)));
        let report = solve(&lg.graph, &opts);
        all_complete &= report.complete;
        rows.push(SolveSummary::from_report(&name, &report, &lg.labels).to_bench_row());
    }
    emit_rows(&rows, args.format)?;
    let solved: Vec<_> = rows
        .iter()
        .filter(|r| !r.lower_bound)
        .map(|r| r.opt)
        .collect();
    if solved.windows(2).any(|w| w[0] != w[1]) {
        bail!("bounds disagree on the optimum: {solved:?}");
    }
    Ok(if all_complete { EXIT_SOLVED } else { EXIT_OOT })
}

#[derive(Serialize)]
struct BenchLine {
    #[serde(flatten)]
    row: BenchRow,
    expected: Option<usize>,
    matches: Option<bool>,
}

fn bench_line(args: &BenchArgs, row: &ManifestRow, path: &Path) -> Result<BenchLine> {
    let lg = load(path, FormatHint::Auto)?;
    let opts = SolveOptions::new(row.k)
        .bound(args.bound)
        .time_limit(Some(Duration::from_secs_f64(args.time_limit)));
    let report = solve(&lg.graph, &opts);
    let row_out = SolveSummary::from_report(&graph_name(path), &report, &lg.labels).to_bench_row();
    let matches = row
        .expected
        .map(|want| report.complete && row_out.opt.size() == Some(want));
    Ok(BenchLine {
        row: row_out,
        expected: row.expected,
        matches,
    })
}

fn run_bench(args: &BenchArgs) -> Result<u8> {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| Usage(format!("cannot read {}: {e}", args.manifest.display())))?;
    let rows = parse_manifest(&text).map_err(|e| Usage(e.to_string()))?;
    let base = args.data_dir.clone().unwrap_or_else(|| {
        args.manifest
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default()
    });
    let mut found = Vec::new();
    for row in rows {
        let name = row.path.to_string_lossy().into_owned();
        let path = if row.path.is_absolute() {
            Some(row.path.clone()).filter(|p| p.is_file())
        } else {
            resolve_dataset(&base, &name)
        };
        match path {
            Some(path) => found.push((row, path)),
            None => eprintln!(
                "warning: {name} not found under {}, row skipped",
                base.display()
            ),
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs as usize)
        .build()?;
    let lines: Vec<BenchLine> = pool.install(|| {
        found
            .par_iter()
            .map(|(row, path)| bench_line(args, row, path))
            .collect::<Result<_>>()
    })?;
    let mismatches = lines.iter().filter(|l| l.matches == Some(false)).count();
    match args.format {
        Format::Json => print_json(&lines)?,
        Format::Tsv => {
            println!("{}\texpected\tmatch", BenchRow::TSV_HEADER);
            for l in &lines {
                let expected = l.expected.map_or("?".to_string(), |e| e.to_string());
                let verdict = match l.matches {
                    Some(true) => "yes",
                    Some(false) => "NO",
                    None => "-",
                };
                println!("{}\t{expected}\t{verdict}", l.row.to_tsv());
            }
        }
    }
    Ok(if mismatches > 0 {
        EXIT_MISMATCH
    } else {
        EXIT_SOLVED
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_SOLVED
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Verify(a) => run_verify(a),
        Command::BoundsCompare(a) => run_compare(a),
        Command::Bench(a) => run_bench(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
    }
}

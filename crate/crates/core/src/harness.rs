//! Seeded random suites, the bound dominance checks, benchmark manifests
//! and the flat run summary the CLI prints.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    club_bound, coloring_bound, dp_bound, greedy_partition, pack_color_conf, packing_bound,
    sorting_bound, BoundKind, Partition,
};
use crate::generators::gnp;
use crate::graph::Vertex;
use crate::model::{Instance, Role};
use crate::oracle::{brute_instance_opt, OracleLimits};
use crate::solver::SolveReport;

/// Edge probabilities used by the random suites.
pub const EDGE_PROBABILITIES: [f64; 5] = [0.2, 0.35, 0.5, 0.65, 0.8];

/// Random `(G, P, R)` with `G = G(n, p)`, `n` in `n_range`, `k` in
/// `0..=max_k`, `|P| ≤ 3` with `r(P) ≥ 0`. Each remaining vertex lands in
/// `R` with probability 0.8, otherwise outside.
pub fn random_instance<R: Rng>(rng: &mut R, n_range: (usize, usize), max_k: usize) -> Instance {
    let n = rng.gen_range(n_range.0..=n_range.1);
    let p = *EDGE_PROBABILITIES.choose(rng).unwrap();
    let k = rng.gen_range(0..=max_k);
    let g = gnp(n, p, rng);
    loop {
        let mut ids: Vec<Vertex> = g.vertices().collect();
        ids.shuffle(rng);
        let p_len = rng.gen_range(0..=3.min(n));
        let (p_part, rest) = ids.split_at(p_len);
        let mut p_set = p_part.to_vec();
        p_set.sort_unstable();
        let mut r_set: Vec<Vertex> = rest.iter().copied().filter(|_| rng.gen_bool(0.8)).collect();
        r_set.sort_unstable();
        let inst = Instance::new(g.clone(), k, &p_set, &r_set).expect("disjoint valid ids");
        if inst.slack() >= 0 {
            return inst;
        }
    }
}

/// An instance with its exhaustive optimum and a lower bound drawn from
/// `{ω − 1, ω}`.
#[derive(Clone, Debug)]
pub struct SuiteCase {
    pub instance: Instance,
    pub omega: usize,
    pub lb: usize,
}

pub fn random_case<R: Rng>(rng: &mut R, n_range: (usize, usize), max_k: usize) -> SuiteCase {
    let instance = random_instance(rng, n_range, max_k);
    let omega = brute_instance_opt(&instance, None, &OracleLimits::default())
        .expect("suite sizes fit the oracle")
        .expect("r(P) >= 0 makes P itself feasible");
    let lb = omega - rng.gen_range(0..=1usize.min(omega));
    SuiteCase {
        instance,
        omega,
        lb,
    }
}

/// The five dominance relations between bounds on one partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    PccAtMostDp,
    DpEqualsSorting,
    SortingAtMostPacking,
    DpAtMostColoring,
    ClubAtMostPacking,
}

impl Relation {
    pub const ALL: [Relation; 5] = [
        Relation::PccAtMostDp,
        Relation::DpEqualsSorting,
        Relation::SortingAtMostPacking,
        Relation::DpAtMostColoring,
        Relation::ClubAtMostPacking,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Relation::PccAtMostDp => "pcc <= dp",
            Relation::DpEqualsSorting => "dp == sorting",
            Relation::SortingAtMostPacking => "sorting <= packing",
            Relation::DpAtMostColoring => "dp <= coloring",
            Relation::ClubAtMostPacking => "club <= packing",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Every bound on one instance, all sharing `part`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundValues {
    pub packing: usize,
    pub coloring: usize,
    pub sorting: usize,
    pub club: usize,
    pub dp: usize,
    pub pcc: usize,
}

impl BoundValues {
    pub fn compute(inst: &Instance, lb: usize, part: &Partition) -> Self {
        BoundValues {
            packing: packing_bound(inst),
            coloring: coloring_bound(inst, part),
            sorting: sorting_bound(inst, part),
            club: club_bound(inst),
            dp: dp_bound(inst, part),
            pcc: pack_color_conf(inst, lb, part),
        }
    }

    pub fn get(&self, kind: BoundKind) -> Option<usize> {
        match kind {
            BoundKind::None => None,
            BoundKind::Packing => Some(self.packing),
            BoundKind::Coloring => Some(self.coloring),
            BoundKind::Sorting => Some(self.sorting),
            BoundKind::Club => Some(self.club),
            BoundKind::Dp => Some(self.dp),
            BoundKind::Pcc => Some(self.pcc),
        }
    }

    pub fn holds(&self, rel: Relation) -> bool {
        match rel {
            Relation::PccAtMostDp => self.pcc <= self.dp,
            Relation::DpEqualsSorting => self.dp == self.sorting,
            Relation::SortingAtMostPacking => self.sorting <= self.packing,
            Relation::DpAtMostColoring => self.dp <= self.coloring,
            Relation::ClubAtMostPacking => self.club <= self.packing,
        }
    }
}

/// Violation counts per relation over a suite.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DominanceReport {
    pub instances: usize,
    pub violations: Vec<(Relation, usize)>,
}

impl DominanceReport {
    pub fn total_violations(&self) -> usize {
        self.violations.iter().map(|v| v.1).sum()
    }
}

/// Checks the dominance relations on `count` random instances.
pub fn dominance_suite<R: Rng>(rng: &mut R, count: usize) -> DominanceReport {
    let mut violations: Vec<(Relation, usize)> = Relation::ALL.iter().map(|&r| (r, 0)).collect();
    for _ in 0..count {
        let case = random_case(rng, (6, 14), 4);
        let part = greedy_partition(&case.instance);
        let values = BoundValues::compute(&case.instance, case.lb, &part);
        for (rel, bad) in violations.iter_mut() {
            if !values.holds(*rel) {
                *bad += 1;
            }
        }
    }
    DominanceReport {
        instances: count,
        violations,
    }
}

/// One-line summary of an instance for failure messages: `P`, `R` or `.`
/// per vertex.
pub fn describe(inst: &Instance) -> String {
    let roles: String = inst
        .graph()
        .vertices()
        .map(|v| match inst.role(v) {
            Role::P => 'P',
            Role::R => 'R',
            Role::Outside => '.',
        })
        .collect();
    format!(
        "n={} m={} k={} roles={roles}",
        inst.graph().n(),
        inst.graph().m(),
        inst.k()
    )
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ManifestError {
    #[error("manifest line {line}: {msg}")]
    Line { line: usize, msg: String },
}

/// One benchmark row: a graph file, `k`, and the expected optimum if known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestRow {
    pub path: PathBuf,
    pub k: usize,
    pub expected: Option<usize>,
}

/// Whitespace-separated `path k expected` lines; `expected` is a number or
/// `?`. Blank lines and lines starting with `#` are skipped. Relative paths
/// are kept as written.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRow>, ManifestError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| ManifestError::Line { line: i + 1, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [path, k, expected] = fields[..] else {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        };
        let k = k.parse().map_err(|_| err(format!("bad k {k:?}")))?;
        let expected = match expected {
            "?" => None,
            e => Some(
                e.parse()
                    .map_err(|_| err(format!("bad expected opt {e:?}")))?,
            ),
        };
        rows.push(ManifestRow {
            path: PathBuf::from(path),
            k,
            expected,
        });
    }
    Ok(rows)
}

/// `dir/name` if it exists, else the first entry of `dir` named
/// `stem.<anything>` where `stem` is `name` up to its first dot.
pub fn resolve_dataset(dir: &Path, name: &str) -> Option<PathBuf> {
    let exact = dir.join(name);
    if exact.is_file() {
        return Some(exact);
    }
    let stem = name.split('.').next().unwrap_or(name);
    let mut hits: Vec<PathBuf> = std::fs::read_dir(dir)
        .ok()?
        .flatten()
        .map(|e| e.path())
        .filter(|p| {
            p.is_file()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n == stem || n.starts_with(&format!("{stem}.")))
        })
        .collect();
    hits.sort();
    hits.into_iter().next()
}

/// Optimum size, or `"no"` when there is no solution of size `k + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Opt {
    Size(usize),
    No(NoWord),
}

/// The literal string `"no"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoWord {
    #[serde(rename = "no")]
    No,
}

impl Opt {
    pub fn size(self) -> Option<usize> {
        match self {
            Opt::Size(s) => Some(s),
            Opt::No(_) => None,
        }
    }
}

impl From<Option<usize>> for Opt {
    fn from(v: Option<usize>) -> Self {
        v.map_or(Opt::No(NoWord::No), Opt::Size)
    }
}

impl fmt::Display for Opt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Opt::Size(s) => write!(f, "{s}"),
            Opt::No(_) => f.write_str("no"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Solved,
    #[serde(rename = "OOT")]
    Oot,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Solved => "solved",
            RunStatus::Oot => "OOT",
        })
    }
}

/// Flat per-run record. On a timeout `opt` is the best size found and is
/// only a lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub degeneracy: usize,
    pub k: usize,
    pub opt: Opt,
    pub nontrivial: bool,
    pub vertices: Vec<u64>,
    pub nodes: u64,
    pub bound_prunes: u64,
    pub mc_calls: u64,
    pub time_ms: f64,
    pub bound: BoundKind,
    pub status: RunStatus,
}

impl SolveSummary {
    /// `labels` maps internal ids back to input labels.
    pub fn from_report(graph: &str, report: &SolveReport, labels: &[u64]) -> Self {
        let status = if report.complete {
            RunStatus::Solved
        } else {
            RunStatus::Oot
        };
        let opt = match (status, report.opt()) {
            (RunStatus::Oot, _) => Opt::Size(report.best.size),
            (_, found) => found.into(),
        };
        SolveSummary {
            graph: graph.to_string(),
            n: report.n,
            m: report.m,
            degeneracy: report.degeneracy,
            k: report.k,
            opt,
            nontrivial: report.best.nontrivial,
            vertices: {
                let mut v: Vec<u64> = report
                    .best
                    .vertices
                    .iter()
                    .map(|&v| labels[v as usize])
                    .collect();
                v.sort_unstable();
                v
            },
            nodes: report.stats.nodes,
            bound_prunes: report.stats.bound_prunes,
            mc_calls: report.stats.mc_calls,
            time_ms: report.stats.wall_seconds * 1e3,
            bound: report.bound,
            status,
        }
    }

    pub fn to_bench_row(&self) -> BenchRow {
        BenchRow {
            graph: self.graph.clone(),
            k: self.k,
            opt: self.opt,
            lower_bound: self.status == RunStatus::Oot,
            nodes_thousands: self.nodes as f64 / 1e3,
            time_seconds: self.time_ms / 1e3,
            bound: self.bound,
            status: self.status,
        }
    }
}

/// One row in the table layout: graph, k, opt, nodes in thousands, time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub graph: String,
    pub k: usize,
    pub opt: Opt,
    /// True for OOT rows: `opt` is the best found, not proven.
    pub lower_bound: bool,
    pub nodes_thousands: f64,
    pub time_seconds: f64,
    pub bound: BoundKind,
    pub status: RunStatus,
}

impl BenchRow {
    pub const TSV_HEADER: &'static str = "graph\tk\topt\tnodes_1e3\ttime_s\tbound\tstatus";

    pub fn to_tsv(&self) -> String {
        let marker = if self.lower_bound { ">=" } else { "" };
        format!(
            "{}\t{}\t{marker}{}\t{:.3}\t{:.3}\t{}\t{}",
            self.graph,
            self.k,
            self.opt,
            self.nodes_thousands,
            self.time_seconds,
            self.bound,
            self.status
        )
    }
}

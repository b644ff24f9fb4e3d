use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kdefect::harness::{Opt, RunStatus, SolveSummary};
use kdefect::oracle::brute_max_kdc;
use kdefect::{is_k_defective_clique, parse_graph, parse_labeled, FormatHint, Vertex};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/six.txt")
}

fn kdefect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdefect"))
        .args(args)
        .env_remove("KDEFECT_K")
        .env_remove("KDEFECT_GRAPH")
        .env_remove("KDEFECT_DATA_DIR")
        .output()
        .expect("run kdefect")
}

fn summary(out: &Output) -> SolveSummary {
    serde_json::from_slice(&out.stdout).expect("solve prints a JSON summary")
}

fn solve_fixture(k: &str, bound: &str) -> (SolveSummary, i32) {
    let path = fixture();
    let out = kdefect(&[
        "solve",
        "--graph",
        path.to_str().unwrap(),
        "--k",
        k,
        "--bound",
        bound,
    ]);
    (summary(&out), out.status.code().unwrap())
}

#[test]
fn fixture_solution_matches_oracle() {
    let g = parse_graph(&fs::read(fixture()).unwrap(), FormatHint::Auto).unwrap();
    let want = brute_max_kdc(&g, 1).unwrap().size;
    let (s, code) = solve_fixture("1", "pcc");
    assert_eq!(code, 0);
    assert_eq!(s.opt, Opt::Size(want));
    assert!(s.nontrivial);
    assert_eq!(s.status, RunStatus::Solved);
    // vertices are input labels
    let lg = parse_labeled(&fs::read(fixture()).unwrap(), FormatHint::Auto).unwrap();
    let ids: Vec<Vertex> = s
        .vertices
        .iter()
        .map(|l| lg.labels.iter().position(|x| x == l).unwrap() as Vertex)
        .collect();
    assert_eq!(ids.len(), want);
    assert!(is_k_defective_clique(&lg.graph, &ids, 1));
}

#[test]
fn large_k_reports_no() {
    let (s, code) = solve_fixture("5", "pcc");
    assert_eq!(code, 0);
    assert_eq!(s.opt, Opt::from(None));
    assert_eq!(s.status, RunStatus::Solved);
}

#[test]
fn bound_choice_does_not_change_opt() {
    let (with_none, _) = solve_fixture("1", "none");
    for bound in ["packing", "coloring", "sorting", "club", "dp", "pcc"] {
        assert_eq!(solve_fixture("1", bound).0.opt, with_none.opt, "{bound}");
    }
}

#[test]
fn summary_json_round_trips() {
    let path = fixture();
    let out = kdefect(&["solve", "--graph", path.to_str().unwrap(), "--k", "1"]);
    let s = summary(&out);
    let again: SolveSummary = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(again, s);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(kdefect(&["solve", "--k", "1"]).status.code(), Some(64));
    let path = fixture();
    let p = path.to_str().unwrap();
    assert_eq!(
        kdefect(&["solve", "--graph", p, "--k", "1", "--bound", "best"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(
        kdefect(&["solve", "--graph", p, "--k", "-1"]).status.code(),
        Some(64)
    );
    assert_eq!(
        kdefect(&["solve", "--graph", p, "--k", "1", "--time-limit", "0"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(
        kdefect(&["solve", "--graph", "/no/such/file", "--k", "1"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(kdefect(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn env_overrides_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_kdefect"))
        .args(["solve", "--format", "tsv"])
        .env("KDEFECT_GRAPH", fixture())
        .env("KDEFECT_K", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(&row[..3], &["six.txt", "1", "4"]);
}

#[test]
fn timeout_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dense.txt");
    let mut text = String::new();
    for u in 0..120u32 {
        for v in u + 1..120 {
            if (u * 7 + v * 13) % 5 != 0 {
                text.push_str(&format!("{u} {v}\n"));
            }
        }
    }
    fs::write(&path, text).unwrap();
    let out = kdefect(&[
        "solve",
        "--graph",
        path.to_str().unwrap(),
        "--k",
        "3",
        "--time-limit",
        "0.000001",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(summary(&out).status, RunStatus::Oot);
}

#[test]
fn bench_rows_compare_and_skip() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture(), dir.path().join("six.txt")).unwrap();
    let manifest = dir.path().join("rows.manifest");
    fs::write(
        &manifest,
        "# graph k opt\nsix.txt 1 4\nsix.txt 2 ?\nabsent.mtx 1 9\n",
    )
    .unwrap();
    let out = kdefect(&["bench", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 3);
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("absent.mtx not found"));

    fs::write(&manifest, "six.txt 1 5\n").unwrap();
    assert_eq!(
        kdefect(&["bench", manifest.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn parallel_bench_keeps_row_order() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture(), dir.path().join("six.txt")).unwrap();
    let manifest = dir.path().join("rows.manifest");
    fs::write(
        &manifest,
        "six.txt 0 3\nsix.txt 1 4\nsix.txt 2 ?\nsix.txt 3 ?\n",
    )
    .unwrap();
    let path = manifest.to_str().unwrap();
    let seq = kdefect(&["bench", path, "--format", "json"]);
    let par = kdefect(&["bench", path, "--format", "json", "--jobs", "3"]);
    assert_eq!(par.status.code(), Some(0));
    let rows = |out: &Output| -> Vec<(u64, serde_json::Value)> {
        let v: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
        v.into_iter()
            .map(|r| (r["k"].as_u64().unwrap(), r["opt"].clone()))
            .collect()
    };
    assert_eq!(rows(&seq), rows(&par));
    assert_eq!(
        rows(&par).iter().map(|r| r.0).collect::<Vec<_>>(),
        [0, 1, 2, 3]
    );
}

#[test]
fn random_modes_pass() {
    let out = kdefect(&["bounds-compare", "--seed", "42", "--instances", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("violations: 0").count(), 5);

    let out = kdefect(&["verify", "--seed", "7", "--count", "40", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("disagreements: 0"));
}

#[test]
fn verify_single_graph() {
    let path = fixture();
    let out = kdefect(&["verify", "--graph", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["oracle"], 4);
    assert_eq!(v["agree"], true);
}

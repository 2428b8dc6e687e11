use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn curvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvlab"))
        .args(args)
        .env("CURVLAB_THREADS", "2")
        .output()
        .expect("run curvlab")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn gen(dir: &Path, family: &str, weighting: &str) -> PathBuf {
    let path = dir.join(format!("{}-{weighting}.graph.json", family.replace(':', "")));
    let out = curvlab(&["gen", family, "--weighting", weighting, "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    path
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

#[test]
fn cycle_curvature_table() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "cycle:6", "unit");
    let out = curvlab(&["curvature", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("pair,d,kappa_primal,kappa_dual,gap"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let fields: Vec<&str> = row.rsplitn(4, ',').collect();
        assert_eq!(fields[..3], ["0", "0", "0"], "{row}");
    }
}

#[test]
fn exact_k2_curvature() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "complete:2", "unit");
    let out = curvlab(&["curvature", g.to_str().unwrap(), "--mode", "exact", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let text = v.to_string();
    assert!(text.contains("\"2\""), "{text}");
}

#[test]
fn unknown_vertex_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "cycle:6", "unit");
    let out = curvlab(&["plan", g.to_str().unwrap(), "--pair", "0,zz"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("zz"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(curvlab(&["curvature"]).status.code(), Some(2));
    assert_eq!(curvlab(&["gen", "mobius:4"]).status.code(), Some(2));
    assert_eq!(curvlab(&["no-implication", "--max-vertices", "9"]).status.code(), Some(2));
    assert_eq!(curvlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_graph_file() {
    let out = curvlab(&["bakry-emery", "/nonexistent/g.graph.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_graph_reloads_identically() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "grid:3x4", "degree-one");
    let first = fs::read_to_string(&g).unwrap();
    let out = curvlab(&["check-hypotheses", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let second = stdout(&curvlab(&["gen", "grid:3x4", "--weighting", "degree-one"]));
    assert_eq!(first, second);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "hypercube:3", "degree-one");
    let g = g.to_str().unwrap();
    for args in [
        vec!["curvature", g, "--pairs", "all"],
        vec!["decay", g, "--seed", "7", "--count", "5"],
        vec!["concentration", g, "--seed", "7", "--count", "5"],
        vec!["bakry-emery", g, "--format", "json"],
    ] {
        let a = curvlab(&args);
        let b = curvlab(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn grid_surgery_meets_bound() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "grid:4x4", "unit");
    let out = curvlab(&["surgery", g.to_str().unwrap(), "--pair", "1_1,1_2", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["holds"], true);
    assert_eq!(v["kappa"]["exact"], "0");
    assert_eq!(v["mass_beyond"]["exact"], "1");
}

#[test]
fn surgery_rejects_bad_neighbor() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "cycle:6", "unit");
    let out = curvlab(&["surgery", g.to_str().unwrap(), "--pair", "0,2", "--xprime", "5"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn k2_bakry_emery() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "complete:2", "unit");
    let out = curvlab(&["bakry-emery", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "vertex,be_curvature\n0,2\n1,2\n");
}

#[test]
fn no_implication_small_search_is_exhausted() {
    let dir = TempDir::new().unwrap();
    let out = curvlab(&["no-implication", "--max-vertices", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("exhaust"), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["exhausted"], true);
}

#[test]
fn concentration_preconditions() {
    let dir = TempDir::new().unwrap();
    let c6 = gen(dir.path(), "cycle:6", "unit");
    let out = curvlab(&["concentration", c6.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Deg_max"), "{}", stderr(&out));

    let k5 = gen(dir.path(), "complete:5", "degree-one");
    let out = curvlab(&["concentration", k5.to_str().unwrap(), "--K", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("infimum"), "{}", stderr(&out));

    let plot = dir.path().join("tail.txt");
    let out = curvlab(&["concentration", k5.to_str().unwrap(), "--plot", plot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(plot).unwrap().lines().count(), 4);
}

#[test]
fn decay_on_complete_graph() {
    let dir = TempDir::new().unwrap();
    let k5 = gen(dir.path(), "complete:5", "degree-one");
    let out = curvlab(&["decay", k5.to_str().unwrap(), "--count", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn heat_from_function_file() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "path:3", "unit");
    let f = dir.path().join("f.json");
    fs::write(&f, r#"{"values": {"0": 1, "1": 0, "2": -1}}"#).unwrap();
    let out = curvlab(&["heat", g.to_str().unwrap(), "--function", f.to_str().unwrap(), "--t-grid", "0,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains('1'));

    fs::write(&f, r#"{"values": {"0": 1}}"#).unwrap();
    let out = curvlab(&["heat", g.to_str().unwrap(), "--function", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_dot_labels() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "cycle:6", "unit");
    let csv = dir.path().join("k.csv");
    let out = curvlab(&["curvature", g.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = curvlab(&["export-dot", g.to_str().unwrap(), "--curvature", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let dot = stdout(&out);
    assert!(dot.starts_with("graph curvature {"));
    assert_eq!(dot.matches("label=\"0\"").count(), 6, "{dot}");
    assert!(dot.contains("BE=0"), "{dot}");
}

#[test]
fn bad_thread_count() {
    let out = Command::new(env!("CARGO_BIN_EXE_curvlab"))
        .args(["gen", "cycle:3"])
        .env("CURVLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

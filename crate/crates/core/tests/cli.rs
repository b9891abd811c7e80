use std::io::Write;
use std::process::{Command, Output};

use dgk::example::G7_EDGES;
use serde_json::Value;
use tempfile::NamedTempFile;

fn dgk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgk"))
        .env_remove("DGK_MODE")
        .args(args)
        .output()
        .expect("binary runs")
}

fn graph_file(text: &str) -> NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".txt").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn analyze_reports_the_two_reaches_of_g7() {
    let f = graph_file(G7_EDGES);
    let out = dgk(&["analyze", path(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["k"], 2);
    let r = &v["reaches"];
    assert_eq!(strings(&r[0]["vertices"]), ["1", "2", "6", "7"]);
    assert_eq!(strings(&r[0]["cabal"]), ["1"]);
    assert_eq!(strings(&r[1]["exclusive"]), ["3", "4", "5"]);
    assert_eq!(strings(&r[1]["common"]), ["6", "7"]);
    assert_eq!(r[1]["period"], 3);
}

#[test]
fn rank_prints_exact_fractions() {
    let f = graph_file(G7_EDGES);
    let out = dgk(&["rank", path(&f), "--alpha", "1", "--teleport", "uniform"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(
        strings(&v["pagerank"]),
        ["11/42", "1/14", "25/147", "22/147", "23/147", "2/21", "2/21"]
    );
    assert_eq!(
        strings(&v["influence"]),
        ["3/7", "0/1", "4/21", "4/21", "4/21", "0/1", "0/1"]
    );
    assert_eq!(v["pi_t"], "11/73");
    assert_eq!(v["beta"], "1/2");
}

#[test]
fn rank_in_float_mode_prints_numbers() {
    let f = graph_file(G7_EDGES);
    let out = dgk(&["--arithmetic", "float", "rank", path(&f), "--beta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let p0 = v["pagerank"][0].as_f64().unwrap();
    assert!((p0 - 11.0 / 42.0).abs() < 1e-9);
}

#[test]
fn arithmetic_can_come_from_the_environment() {
    let f = graph_file(G7_EDGES);
    let out = Command::new(env!("CARGO_BIN_EXE_dgk"))
        .env("DGK_MODE", "rational")
        .args(["check-appendix", path(&f)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_dgk"))
        .env("DGK_MODE", "float")
        .args(["check-appendix", path(&f)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn kernels_of_g7() {
    let f = graph_file(G7_EDGES);
    let out = dgk(&["kernels", path(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2/3"));
    assert!(text.contains("1/3"));
}

#[test]
fn simulate_writes_csv_with_a_limit_row() {
    let f = graph_file("a b\nb a\n");
    let out = dgk(&[
        "--format",
        "csv",
        "simulate",
        path(&f),
        "--steps",
        "2",
        "--init",
        "delta:a",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "step,a,b\n0,1/1,0/1\n1,0/1,1/1\n2,1/1,0/1\nlimit,1/2,1/2\n"
    );
}

#[test]
fn continuous_simulation_uses_time_column() {
    let f = graph_file(G7_EDGES);
    let out = dgk(&[
        "--arithmetic",
        "float",
        "--format",
        "csv",
        "simulate",
        path(&f),
        "--mode",
        "continuous",
        "--steps",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,1,2,3,4,5,6,7\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn verify_paper_example_passes_on_the_embedded_graph() {
    let out = dgk(&["--format", "text", "verify-paper-example"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"));
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 25);
}

#[test]
fn verify_paper_example_fails_on_another_graph() {
    let f = graph_file("1 2\n2 3\n");
    let out = dgk(&["verify-paper-example", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    let f = graph_file(G7_EDGES);
    assert_eq!(
        dgk(&["simulate", path(&f), "--process", "consensus"]).status.code(),
        Some(2)
    );
    assert_eq!(dgk(&["rank", path(&f), "--beta", "3/2"]).status.code(), Some(2));
    assert_eq!(dgk(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_three() {
    assert_eq!(dgk(&["analyze", "/nonexistent/graph.txt"]).status.code(), Some(3));
    assert_eq!(
        dgk(&["verify-paper-example", "/nonexistent/graph.txt"]).status.code(),
        Some(3)
    );
    let split = graph_file("a b\nc d\n");
    assert_eq!(dgk(&["analyze", path(&split)]).status.code(), Some(3));
    let out = dgk(&["analyze", path(&split), "--per-component"]);
    assert_eq!(out.status.code(), Some(0));
    let bad = graph_file("a b -1\n");
    assert_eq!(dgk(&["analyze", path(&bad)]).status.code(), Some(3));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let f = graph_file(G7_EDGES);
    for args in [
        vec!["rank", path(&f)],
        vec!["--arithmetic", "float", "simulate", path(&f), "--mode", "continuous"],
        vec!["kernels", path(&f)],
    ] {
        let a = dgk(&args);
        let b = dgk(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

//! End-to-end checks of the hyperquasi binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hyperquasi")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("hyperquasi-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn gen_coregular(path: &Path) {
    let out = run(&[
        "gen",
        "coregular",
        "--k",
        "3",
        "--n",
        "5",
        "--d",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_coregular_writes_parseable_file() {
    let path = tmp("coreg.txt");
    gen_coregular(&path);
    let h = hyperquasi::hypergraph::read_hypergraph(&path).unwrap();
    assert_eq!(h.k(), 3);
    assert_eq!(h.n(), 5);
    assert_eq!(h.is_coregular(), Some(2));
}

#[test]
fn partitions_lists_proper_partitions() {
    let out = run(&["partitions", "--k", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec!["1+1+1+1", "1+1+2", "1+3", "2+2"]);
}

#[test]
fn check_emits_deterministic_report_and_exit_code() {
    let input = tmp("check-input.txt");
    let out_a = tmp("report-a.json");
    let out_b = tmp("report-b.json");
    let gen = run(&[
        "gen", "random", "--k", "2", "--n", "16", "--p", "0.5", "--seed", "7", "-o",
        input.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let args = |out: &Path| {
        vec![
            "check".to_string(),
            "--input".into(),
            input.to_str().unwrap().into(),
            "--pi".into(),
            "1+1".into(),
            "--p".into(),
            "0.5".into(),
            "--eps".into(),
            "0.15".into(),
            "--props".into(),
            "eig,expand".into(),
            "--seed".into(),
            "3".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let run_a = Command::new(bin()).args(args(&out_a)).output().unwrap();
    let run_b = Command::new(bin()).args(args(&out_b)).output().unwrap();
    // identical config + seed => byte-identical report
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    assert_eq!(run_a.status.code(), run_b.status.code());

    let report: serde_json::Value = serde_json::from_slice(&bytes_a).unwrap();
    let verdicts = &report["reports"][0]["verdicts"];
    assert!(verdicts.get("eig").is_some());
    assert!(verdicts.get("expand").is_some());
    let all_pass = report["all_pass"].as_bool().unwrap();
    assert_eq!(run_a.status.code(), Some(i32::from(!all_pass)));
}

#[test]
fn count_trace_matches_homs() {
    let input = tmp("count-input.txt");
    gen_coregular(&input);
    let trace = run(&[
        "count", "--input", input.to_str().unwrap(), "--pi", "1+2", "--mode", "trace", "--ell",
        "2",
    ]);
    assert!(trace.status.success());
    let homs = run(&[
        "count", "--input", input.to_str().unwrap(), "--pi", "1+2", "--template", "cycle",
        "--mode", "homs", "--ell", "2",
    ]);
    assert!(homs.status.success());
    let t: serde_json::Value = serde_json::from_slice(&trace.stdout).unwrap();
    let h: serde_json::Value = serde_json::from_slice(&homs.stdout).unwrap();
    assert_eq!(t["count"], h["count"]);
    assert_eq!(t["method"], "trace");
    assert_eq!(h["method"], "brute_force");
}

#[test]
fn templates_export_writes_text_and_sidecar() {
    let dir = tmp("templates");
    let out = run(&[
        "templates",
        "export",
        "--pi",
        "1+2",
        "--kind",
        "cycle",
        "--ell",
        "2",
        "-o",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let graph = hyperquasi::hypergraph::read_hypergraph(dir.join("cycle_1+2_len4.txt")).unwrap();
    assert_eq!(graph.n(), 6);
    assert_eq!(graph.edge_count(), 4);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("cycle_1+2_len4.labels.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["vertices"].as_array().unwrap().len(), 6);
}

#[test]
fn spectra_reports_coregular_collapse() {
    let input = tmp("spectra-input.txt");
    gen_coregular(&input);
    let out = run(&["spectra", "--input", input.to_str().unwrap(), "--pi", "1+2"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["coregular_d"], 2);
    let lower = report["lambda1_lower"].as_f64().unwrap();
    let upper = report["lambda1_upper"].as_f64().unwrap();
    let expected = 2.0 * 5.0f64.sqrt();
    assert!((lower - expected).abs() < 1e-8);
    assert!((upper - expected).abs() < 1e-8);
}

#[test]
fn env_var_overrides_matrix_cap() {
    let input = tmp("cap-input.txt");
    let gen = run(&[
        "gen", "random", "--k", "3", "--n", "5", "--p", "0.5", "--seed", "1", "-o",
        input.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    // non-coregular input needs the flat matrix (side 5 > cap 2)
    let out = Command::new(bin())
        .args(["spectra", "--input", input.to_str().unwrap(), "--pi", "1+2"])
        .env("HYPERQUASI_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds cap"));
}

#[test]
fn malformed_input_is_a_clean_error() {
    let path = tmp("malformed.txt");
    std::fs::write(&path, "k=3 n=5 loops=0\n0 1\n").unwrap();
    let out = run(&["spectra", "--input", path.to_str().unwrap(), "--pi", "1+2"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

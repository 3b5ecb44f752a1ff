use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use vph_core::io::read_diagrams;

fn vph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vph")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SQUARE: &str = "x1,x2\n0,0\n1,0\n0,1\n1,1\n";

#[test]
fn empty_cloud_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let cloud = write(&dir, "empty.csv", "");
    let out = vph(&["diagram", &cloud]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));
}

#[test]
fn malformed_row_reports_its_number() {
    let dir = TempDir::new().unwrap();
    let cloud = write(&dir, "bad.csv", "x1,x2\n0,0\n1,zz\n");
    let out = vph(&["diagram", &cloud]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("row 3"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cloud = write(&dir, "c.csv", SQUARE);
    assert_eq!(vph(&["diagram", &cloud, "--bogus"]).status.code(), Some(2));
    assert_eq!(vph(&["diagram", &cloud, "--kappa", "alpha"]).status.code(), Some(2));
    assert_eq!(vph(&["diagram", &cloud, "--field", "4"]).status.code(), Some(2));
    assert_eq!(vph(&["diagram", &cloud, "--tmax", "-1"]).status.code(), Some(2));
    assert_eq!(vph(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn full_rips_summary_on_four_points() {
    let dir = TempDir::new().unwrap();
    let cloud = write(&dir, "c.csv", SQUARE);
    let out = dir.path().join("out");
    let status = vph(&["diagram", &cloud, "--qmax", "3", "--out", path(&out)]).status;
    assert!(status.success());
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let counts: Vec<u64> = summary["cardinalities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["cardinality"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, [4, 3, 1, 0]);
    assert_eq!(summary["t_max"], "inf");
    assert_eq!(summary["points"], 4);
    assert_eq!(summary["simplices"], 15);
}

#[test]
fn diagram_csv_round_trips() {
    let dir = TempDir::new().unwrap();
    let cloud = write(
        &dir,
        "c.csv",
        "x1,x2,mark\n0,0,0.1\n1.5,0.2,0\n0.3,1.1,0.2\n1.2,1.4,0.05\n2.5,0.7,0\n",
    );
    let out = dir.path().join("out");
    assert!(vph(&[
        "diagram",
        &cloud,
        "--kappa",
        "cech-marked",
        "--qmax",
        "2",
        "--out",
        path(&out)
    ])
    .status
    .success());
    let text = fs::read(out.join("diagrams/diagram.csv")).unwrap();
    let parsed = read_diagrams(text.as_slice()).unwrap();
    let mut again = Vec::new();
    let diagrams: Vec<_> = parsed.into_values().collect();
    vph_core::io::write_diagrams(&mut again, &diagrams).unwrap();
    assert_eq!(text, again);

    let stdout = vph(&["diagram", &cloud, "--kappa", "cech-marked", "--qmax", "2"]).stdout;
    assert_eq!(stdout, text);
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cloud = write(&dir, "c.csv", SQUARE);
    let run = |name: &str| {
        let out = dir.path().join(name);
        assert!(vph(&["diagram", &cloud, "--kappa", "cech", "--out", path(&out)])
            .status
            .success());
        (
            fs::read(out.join("diagrams/diagram.csv")).unwrap(),
            fs::read(out.join("summary.json")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn single_degree_output() {
    let dir = TempDir::new().unwrap();
    let cloud = write(&dir, "c.csv", SQUARE);
    let text = String::from_utf8(vph(&["diagram", &cloud, "--q", "1"]).stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,birth,death");
    assert_eq!(lines.len(), 1 + 3);
    assert!(lines[1..].iter().all(|l| l.starts_with("1,")));
    assert_eq!(
        vph(&["diagram", &cloud, "--q", "2", "--qmax", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn budget_overflow_exits_4() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("x1,x2\n");
    for i in 0..300 {
        text.push_str(&format!("{},{}\n", i % 20, i / 20));
    }
    let cloud = write(&dir, "big.csv", &text);
    let out = vph(&["diagram", &cloud, "--qmax", "3"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

fn dist(a: &str, b: &str, q: &str) -> (Option<i32>, Value) {
    let out = vph(&["dist", a, b, "--q", q]);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code(), json)
}

#[test]
fn dist_examples() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "q,birth,death\n1,0,1\n1,2,inf\n0,0,inf\n");
    let b = write(&dir, "b.csv", "q,birth,death\n1,0.5,1.5\n1,2.25,inf\n0,0,1\n0,0,2\n");

    let (code, same) = dist(&a, &a, "1");
    assert_eq!(code, Some(0));
    assert_eq!(same["value"], 0.0);

    let (_, half) = dist(&a, &b, "1");
    assert_eq!(half["value"], 0.5);
    assert_eq!(half["witness"].as_array().unwrap().len(), 2);

    let (code, mismatch) = dist(&a, &b, "0");
    assert_eq!(code, Some(0));
    assert_eq!(mismatch["value"], "inf");
    assert!(mismatch.get("witness").is_none());

    let (code, _) = dist(&a, &b, "2");
    assert_eq!(code, Some(2));
}

fn clt_config(dir: &TempDir, lambda: f64) -> String {
    let json = format!(
        r#"{{"process": {{"kind": "poisson", "lambda": {lambda}}}, "kappa": "rips", "q": 1, "dim": 2,
            "windows": [3, 4], "t_max": 0.6, "query": {{"r": 0.6, "s": 0.3}}, "replications": 10, "seed": 9}}"#
    );
    write(dir, "clt.json", &json)
}

#[test]
fn experiment_writes_bundle() {
    let dir = TempDir::new().unwrap();
    let config = clt_config(&dir, 2.0);
    let out = dir.path().join("out");
    let code = vph(&["experiment", "clt", "--config", &config, "--out", path(&out)])
        .status
        .code();
    assert!(matches!(code, Some(0 | 3)));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "clt");
    assert_eq!(report["seed"], 9);
    let warnings = report["warnings"].as_array().unwrap();
    assert!(
        warnings.iter().any(|w| w.as_str().unwrap().contains("unit-intensity")),
        "{warnings:?}"
    );
    assert!(out.join("clt_replications.csv").exists());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let config = clt_config(&dir, 1.0);
    let out = dir.path().join("out");
    vph(&[
        "experiment",
        "clt",
        "--config",
        &config,
        "--seed",
        "77",
        "--out",
        path(&out),
    ]);
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 77);
    assert!(report["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn experiment_config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let config = clt_config(&dir, 1.0);
    let out = dir.path().join("out");
    assert_eq!(
        vph(&["experiment", "nope", "--config", &config, "--out", path(&out)])
            .status
            .code(),
        Some(2)
    );

    let bad = write(
        &dir,
        "bad.json",
        r#"{"process": {"kind": "poisson", "lambda": 1.0}, "kappa": "rips", "q": 1, "dim": 2, "windows": [4], "replications": 3, "seed": 1}"#,
    );
    let run = vph(&["experiment", "slln", "--config", &bad, "--out", path(&out)]);
    assert_eq!(run.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("windows") && stderr.contains("grid"), "{stderr}");

    let unknown = write(
        &dir,
        "unknown.json",
        r#"{"process": {"kind": "poisson", "lambda": 1.0}, "colour": 3}"#,
    );
    assert_eq!(
        vph(&["experiment", "mass", "--config", &unknown, "--out", path(&out)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = TempDir::new().unwrap();
    let config = clt_config(&dir, 1.0);
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_vph"))
        .args(["experiment", "clt", "--config", &config, "--out", path(&out)])
        .env("VPH_THREADS", "many")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

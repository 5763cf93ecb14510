use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_specteig"));
    c.env_remove("SPECTEIG_SEED");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eigen_csv_lists_three_clusters() {
    let ex2 = data("example2.tns");
    let o = run(&["eigen", ex2.to_str().unwrap(), "--format", "csv", "--trials", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3, "{text}");
    let lambda: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    assert!((lambda + 1.0954).abs() < 5e-4);
}

#[test]
fn output_is_deterministic_and_seed_env_is_honored() {
    let ex2 = data("example2.tns");
    let args = ["eigen", ex2.to_str().unwrap(), "--format", "json", "--trials", "25"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let env = bin().args(args).env("SPECTEIG_SEED", "2024").output().unwrap();
    assert_eq!(a.stdout, env.stdout);
    let other = bin().args(args).env("SPECTEIG_SEED", "77").output().unwrap();
    let json: serde_json::Value = serde_json::from_slice(&other.stdout).unwrap();
    assert_eq!(json["seed"], 77);

    let tr = ["trust-region", "--random", "5", "--seed", "3", "--format", "csv", "--delta-sweep", "1:3:1"];
    assert_eq!(run(&tr).stdout, run(&tr).stdout);
}

#[test]
fn history_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let ex2 = data("example2.tns");
    let o = run(&[
        "eigen",
        ex2.to_str().unwrap(),
        "--trials",
        "3",
        "--history",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("k,theta,F_theta"));
    assert!(text.lines().count() >= 2);

    let hist = dir.path().join("tr.csv");
    let o = run(&["trust-region", "--random", "3", "--history", hist.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&hist).unwrap().starts_with("k,value"));
}

#[test]
fn input_errors_exit_with_one() {
    let o = run(&["eigen", "/nonexistent/a.tns"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/a.tns"));

    let o = run(&["trust-region", "--random", "3", "--delta", "0"]);
    assert_eq!(o.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tns");
    std::fs::write(&bad, "order 4\ndim 3\n1 1 1 x\n").unwrap();
    let o = run(&["eigen", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["eigen", data("example2.tns").to_str().unwrap(), "--kind", "d"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn indefinite_b_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("b.tns");
    std::fs::write(&b, "order 4\ndim 3\n1 1 1 1 1\n2 2 2 2 -1\n3 3 3 3 1\n").unwrap();
    let o = run(&[
        "eigen",
        data("example2.tns").to_str().unwrap(),
        "--kind",
        "b",
        "--b",
        b.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_passes_and_detects_a_tampered_tensor() {
    let o = run(&["verify", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let checks: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(checks.as_array().unwrap().iter().all(|c| c["pass"] == true));

    let dir = tempfile::tempdir().unwrap();
    let tampered = dir.path().join("ex2.tns");
    let text = std::fs::read_to_string(data("example2.tns")).unwrap();
    std::fs::write(&tampered, text.replace("1 1 1 1 0.2883", "1 1 1 1 -0.9")).unwrap();
    let o = run(&["verify", "--example2", tampered.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn examples_json_has_one_block_per_setup() {
    let dir = tempfile::tempdir().unwrap();
    let sidecar = dir.path().join("side.json");
    let o = run(&["examples", "all", "--format", "json", "--sidecar", sidecar.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let blocks: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let blocks = blocks.as_array().unwrap();
    assert_eq!(blocks.len(), 4);
    for b in blocks {
        assert!(b["report"]["pairs"].as_array().map_or(false, |p| !p.is_empty()));
    }
    assert!(sidecar.exists());
}

#[test]
fn trust_region_reads_a_polynomial_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, r#"{"n": 2, "p": 2, "terms": [{"alpha": [2, 0], "coeff": 1.0}, {"alpha": [0, 2], "coeff": -1.0}]}"#)
        .unwrap();
    let o = run(&["trust-region", path.to_str().unwrap(), "--delta", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &rows.as_array().unwrap()[0];
    assert!((row["value"].as_f64().unwrap() + 1.0).abs() < 1e-8);
    assert!((row["lambda"].as_f64().unwrap() - 2.0).abs() < 1e-8);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_totalwalk"))
        .args(args)
        .env_remove("TOTALWALK_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_json_and_csv() {
    let out = run(&["spectrum", "--family", "knn", "--n", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["multiplicities_match"], true);
    assert!(v["max_diff"].as_f64().unwrap() <= 1e-9);

    let out = run(&["spectrum", "--family", "kn", "--n", "4", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("source,value,multiplicity\n"), "{text}");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["spectrum", "--family", "knn", "--n", "abc"][..],
        &["spectrum", "--family", "knn", "--n", "1"],
        &["spectrum", "--family", "petersen", "--n", "3"],
        &["bogus"],
        &["sweep-epsilon", "--n-min", "20", "--n-max", "10"],
        &["sweep-epsilon", "--step", "0"],
        &["search", "--family", "knn", "--n", "4", "--marked", "both"],
        &["check", "--format", "csv"],
        &["fit", "--input", "/nonexistent/rows.csv"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn search_writes_report_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("k10.json");
    let out = run(&["search", "--family", "kn", "--n", "10", "--out", path_str(&out_path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["report"]["N"], 55);
    assert!(v["p_max"]["p"].as_f64().unwrap() >= 0.7);
    let trace = fs::read_to_string(dir.path().join("k10.trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("t,re_amp,im_amp,p"));
    assert_eq!(lines.count(), 2001);
}

#[test]
fn explicit_trace_path_and_samples() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("walk.csv");
    let out = run(&[
        "search",
        "--family",
        "knn",
        "--n",
        "4",
        "--marked",
        "edge",
        "--samples",
        "101",
        "--trace",
        path_str(&trace),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&trace).unwrap().lines().count(), 102);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kind"], "edge");
}

#[test]
fn sweep_is_deterministic_across_execution_modes() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (name, extra) in [("a.csv", None), ("b.csv", None), ("c.csv", Some("--sequential"))] {
        let path = dir.path().join(name);
        let mut args = vec![
            "sweep-epsilon",
            "--n-min",
            "5",
            "--n-max",
            "41",
            "--out",
            path_str(&path),
        ];
        args.extend(extra);
        let out = run(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    assert!(text.starts_with("n,N,kind,gamma,phi0,s1,s2,lambda_plus,lambda_minus,"));
    assert_eq!(text.lines().count(), 1 + 2 * 19);
}

#[test]
fn thread_count_does_not_change_output() {
    let one = Command::new(env!("CARGO_BIN_EXE_totalwalk"))
        .args(["sweep-epsilon", "--n-min", "5", "--n-max", "25"])
        .env("TOTALWALK_THREADS", "1")
        .output()
        .unwrap();
    let three = run(&["sweep-epsilon", "--n-min", "5", "--n-max", "25", "--threads", "3"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, three.stdout);
    let zero = run(&["sweep-epsilon", "--threads", "0"]);
    assert_eq!(code(&zero), 2);
}

#[test]
fn sweep_json_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let out = run(&["sweep-epsilon", "--marked", "vertex", "--out", path_str(&csv)]);
    assert_eq!(code(&out), 0);
    let out = run(&["fit", "--input", path_str(&csv), "--kind", "vertex"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let slope = v["slope"].as_f64().unwrap();
    assert!((-0.51..=-0.47).contains(&slope), "{slope}");

    let out = run(&["sweep-epsilon", "--n-min", "5", "--n-max", "9", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 6);

    let out = run(&["fit", "--input", path_str(&csv), "--column", "no_such_column"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_reports_json_and_strict_passes() {
    let out = run(&["check", "--n-min", "5", "--n-max", "40", "--step", "5", "--strict"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"family": "knn", "n_min": 5, "n_max": 9, "marked": "edge"}"#,
    )
    .unwrap();
    let out = run(&["--config", path_str(&config), "sweep-epsilon"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 3);
    assert!(text.lines().skip(1).all(|l| l.contains(",edge,")));

    let out = run(&[
        "--config",
        path_str(&config),
        "sweep-epsilon",
        "--marked",
        "vertex",
        "--n-max",
        "7",
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 2);
    assert!(text.lines().skip(1).all(|l| l.contains(",vertex,")));

    fs::write(&config, r#"{"n_mni": 5}"#).unwrap();
    let out = run(&["--config", path_str(&config), "sweep-epsilon"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn strict_assumption_failures_exit_with_three() {
    let plain = run(&["search", "--family", "cycle", "--n", "12"]);
    assert_eq!(code(&plain), 0);
    assert!(String::from_utf8_lossy(&plain.stderr).contains("leakage"));
    let strict = run(&["search", "--family", "cycle", "--n", "12", "--strict"]);
    assert_eq!(code(&strict), 3);
    let clean = run(&["search", "--family", "knn", "--n", "6", "--strict"]);
    assert_eq!(code(&clean), 0, "{}", String::from_utf8_lossy(&clean.stderr));
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let out = run(&[
        "spectrum",
        "--family",
        "kn",
        "--n",
        "4",
        "--out",
        "/nonexistent/dir/s.json",
    ]);
    assert_eq!(code(&out), 1);
}

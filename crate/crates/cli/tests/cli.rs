use std::path::Path;
use std::process::{Command, Output};

fn biact(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biact"))
        .args(args)
        .current_dir(dir)
        .env_remove("BIACT_SAFETY_CAP")
        .output()
        .expect("spawn biact")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn synthesize_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = biact(
        dir.path(),
        &["synthesize", "--regime", "sobolev", "--d", "1", "--n", "2", "--epsilon", "0.05", "--oracle", "sin1d"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(dir.path().join("network.json").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["regime"], "sobolev");
    assert!(report["theoretical_bound"].as_f64().unwrap() <= 0.05);

    let out = biact(dir.path(), &["verify", "--net", "network.json", "--budget", "5000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["measured_sup_error"].as_f64().unwrap() <= v["theoretical_bound"].as_f64().unwrap());
    assert_eq!(v["passed"], true);
}

#[test]
fn violated_bound_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = biact(dir.path(), &["synthesize", "--d", "2", "--n", "1", "--epsilon", "0.2", "--oracle", "exp"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let path = dir.path().join("report.json");
    let mut report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    report["theoretical_bound"] = serde_json::json!(1e-6);
    std::fs::write(&path, report.to_string()).unwrap();
    let out = biact(dir.path(), &["verify", "--net", "network.json", "--budget", "2000"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn evaluate_single_and_union() {
    let dir = tempfile::tempdir().unwrap();
    let out = biact(dir.path(), &["synthesize", "--d", "2", "--n", "3", "--epsilon", "0.1", "--oracle", "xy", "--hex"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = biact(dir.path(), &["evaluate", "--net", "network.json", "--point", "0.5,0.25"]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 0.125).abs() < 1e-12);

    std::fs::write(dir.path().join("pts.txt"), "0.1 0.2\n# comment\n0.3,0.4\n").unwrap();
    let out = biact(dir.path(), &["evaluate", "--net", "network.json", "--points-file", "pts.txt"]);
    let vals: Vec<f64> = stdout(&out).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals.len(), 2);
    assert!((vals[1] - 0.12).abs() < 1e-12);

    let out = biact(
        dir.path(),
        &[
            "synthesize", "--regime", "union_subspaces", "--d", "3", "--d-eff", "1", "--n", "2", "--epsilon", "0.1",
            "--oracle", "ridge", "--out", "u.json", "--report", "u_report.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = biact(dir.path(), &["evaluate", "--net", "u.json", "--point", "0,0.4,0"]);
    assert_eq!(out.status.code(), Some(0));
    let out = biact(dir.path(), &["evaluate", "--net", "u.json", "--point", "0.1,0.4,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("support"));
    let out = biact(dir.path(), &["verify", "--net", "u.json", "--report", "u_report.json", "--budget", "3000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn usage_and_infeasibility_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = biact(dir.path(), &["synthesize", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let out = biact(dir.path(), &["synthesize", "--d", "2", "--n", "2", "--epsilon", "0.1", "--oracle", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("sin, sin1d, exp"));
    let out = biact(dir.path(), &["synthesize", "--d", "3", "--n", "1", "--epsilon", "0.001", "--oracle", "exp"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("13825728072001"), "{}", stderr(&out));
    let out = biact(dir.path(), &["synthesize", "--regime", "union_subspaces", "--d", "3", "--epsilon", "0.1", "--oracle", "exp"]);
    assert_eq!(out.status.code(), Some(1));
    let out = biact(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn rates_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = biact(
        dir.path(),
        &["rates", "--d", "2", "--n", "2", "--oracle", "exp", "--eps-list", "0.25,0.125,0.0625", "--budget", "1000"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("rates.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("epsilon,regime,d,n,d_eff,N,total_parameters"));
    let params: Vec<u64> = lines.map(|l| l.split(',').nth(6).unwrap().parse().unwrap()).collect();
    assert_eq!(params.len(), 3);
    assert!(params.windows(2).all(|w| w[0] < w[1]));
    assert!(stdout(&out).contains("slope"));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = biact(dir.path(), &["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}

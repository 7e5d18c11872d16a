use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("heckeforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn heckeforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heckeforge")).args(args).env("HECKEFORGE_THREADS", "2").output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn q_six_is_rejected() {
    let cfg = scratch("q6.toml", "type = \"A1\"\nq = 6\n");
    let o = heckeforge(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field `q`: 6 is not a prime power"), "{}", stderr(&o));
}

#[test]
fn invalid_type_is_rejected() {
    let cfg = scratch("e9.toml", "type = \"E9\"\nq = 2\n");
    let o = heckeforge(&["describe", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field `type`"), "{}", stderr(&o));
}

#[test]
fn empty_suite_list() {
    let cfg = scratch("empty.toml", "type = \"A1\"\nq = 2\nsuites = []\n");
    let o = heckeforge(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["suites"], serde_json::json!([]));
    assert_eq!(report["passed"], true);
}

#[test]
fn full_run_passes_and_is_reproducible() {
    let cfg = scratch("a1.toml", "type = \"A1\"\nisogeny = \"simply_connected\"\nq = 2\nfield = \"Fp:2\"\nn_max = 4\nseed = 11\n");
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = cfg.with_file_name(format!("report{k}.json"));
        let o = heckeforge(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        reports.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let report: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    let suites = report["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 7);
    assert!(suites.iter().all(|s| s["verdict"]["status"] == "pass"), "{report:#}");
}

#[test]
fn suite_override_and_thread_cap() {
    let cfg = scratch("gl.toml", "type = \"A1\"\nisogeny = \"gl_style\"\ncentral_rank = 1\nq = 3\nfield = \"Q\"\nn_max = 2\n");
    let o = heckeforge(&["run", "--config", cfg.to_str().unwrap(), "--suite", "coxeter", "--suite", "duality"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["suites"][0]["suite"], "coxeter");
    assert_eq!(report["suites"][1]["verdict"]["status"], "skipped");
    let o = heckeforge(&["run", "--config", cfg.to_str().unwrap(), "--suite", "speed"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_heckeforge"))
        .args(["run", "--config", cfg.to_str().unwrap()])
        .env("HECKEFORGE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn describe_inventories() {
    let cfg = scratch("adj.toml", "type = \"A1\"\nisogeny = \"adjoint\"\nq = 2\n");
    let o = heckeforge(&["describe", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("|Omega| = 2") && text.contains("F_0: 1 facet "), "{text}");
    let cfg = scratch("a2.toml", "type = \"A2\"\nq = 3\n");
    let o = heckeforge(&["describe", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("Pi_aff (3 roots)") && text.contains("|T0/T1| = 4"), "{text}");
}

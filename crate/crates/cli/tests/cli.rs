use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
version = 1
name = "cli-smoke"
seed = 42

[dataset]
source = "synthetic"
n_samples = 400
class_mix = [0.6, 0.25, 0.15]
separability = 8.0
n_features = 4
seed = 1
class_names = ["Normal", "DoS", "PortScan"]

[[methods]]
name = "DT"
learner = { kind = "decision_tree" }

[[methods]]
name = "KNN"
learner = { kind = "knn" }
"#;

fn idsemble(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idsemble"))
        .args(args)
        .env_remove("IDSEMBLE_OUT_DIR")
        .env_remove("IDSEMBLE_THREADS")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_accepts_a_good_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let o = idsemble(&["validate", "--config", &cfg]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("ok: 2 methods"));
}

#[test]
fn validate_rejects_an_empty_method_list() {
    let dir = tempfile::tempdir().unwrap();
    let body = CONFIG.split("[[methods]]").next().unwrap();
    let cfg = write_config(dir.path(), body);
    let o = idsemble(&["validate", "--config", &cfg]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no methods"));
}

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("bundle");
    let out_s = out.to_string_lossy().into_owned();
    let o = idsemble(&["run", "--config", &cfg, "--out", &out_s, "--threads", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("Models") && text.contains("Train (s)"));
    assert!(out.join("manifest.json").exists());

    let csv = idsemble(&["report", "--bundle", &out_s, "--format", "csv"]);
    assert!(csv.status.success());
    let csv = stdout(&csv);
    assert!(csv.starts_with("rank,model,accuracy,precision,recall,f1,seconds\n1,"));
    assert_eq!(csv.lines().count(), 3);

    let json = idsemble(&["report", "--bundle", &out_s, "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
}

#[test]
fn report_on_a_missing_bundle_fails() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nothing").to_string_lossy().into_owned();
    let o = idsemble(&["report", "--bundle", &missing]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("reading bundle"));
}

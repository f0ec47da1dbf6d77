use std::fs;
use std::process::{Command, Output};

fn hankel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hankel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn laguerre_moments_are_factorials() {
    let o = hankel(&["moments", "--alpha", "0", "--t", "0", "--n", "3", "--bits", "128"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["K"], 6);
    let vals: Vec<f64> = doc["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().parse().unwrap())
        .collect();
    assert_eq!(vals, [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0]);
}

#[test]
fn cached_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["moments", "--alpha", "0.5", "--t", "1", "--n", "6", "--cache", cache];
    let first = hankel(&args);
    let second = hankel(&args);
    assert!(first.status.success() && second.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&second.stderr).contains("Hit"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn invalid_parameters_exit_with_config_code() {
    assert_eq!(hankel(&["sweep", "--alpha", "-1.5", "--n", "3"]).status.code(), Some(2));
    assert_eq!(hankel(&["sweep", "--t", "-1", "--n", "3"]).status.code(), Some(2));
    assert_eq!(hankel(&["sweep", "--n", "5,3"]).status.code(), Some(2));
    assert_eq!(hankel(&["predict", "--t", "0", "--variant", "proof"]).status.code(), Some(2));
}

#[test]
fn first_order_sweep_gives_golden_eigenvalue() {
    let o = hankel(&["sweep", "--n", "1"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &doc["records"][0];
    assert!(r["lambda_exact"].as_str().unwrap().starts_with("3.8196601125010515180"));
    assert!(r["rayleigh_bound"].as_str().unwrap().starts_with("3.33333333333333333"));
    assert_eq!(doc["pred_proof_variant"], "t0-alpha");
    assert!(r["wall_ms"].is_null());
}

#[test]
fn csv_sweep_has_fixed_header() {
    let o = hankel(&["sweep", "--alpha", "0.5", "--t", "0.1", "--n", "2,4", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,lambda_exact,lambda_lo,lambda_hi,pred_proof,pred_theorem,ratio_proof,ratio_theorem,rayleigh_bound,bits,wall_ms"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn timing_fills_wall_clock_column() {
    let o = hankel(&["sweep", "--n", "2", "--timing"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["records"][0]["wall_ms"].is_u64());
}

#[test]
fn endpoints_mark_hard_edge() {
    let o = hankel(&["endpoints", "--alpha", "0", "--t", "0", "--n", "10", "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("10,true,0e0,4e1"));
    let o = hankel(&["endpoints", "--alpha", "0", "--t", "1", "--n", "100"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows[0]["hard_edge"], false);
}

#[test]
fn verify_passes_and_names_injected_fault() {
    let o = hankel(&["verify", "--instances", "5", "--bits", "128"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = hankel(&["verify", "--instances", "5", "--bits", "128", "--inject-fault", "A5"]);
    assert_eq!(o.status.code(), Some(1));
    let table = stdout(&o);
    let failing: Vec<&str> = table.lines().filter(|l| l.ends_with("FAIL")).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].starts_with("A5"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("A5"));
}

#[test]
fn output_file_and_kernel_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    let o = hankel(&["kernel", "--t", "1", "--n", "9", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 1 + 16);
}

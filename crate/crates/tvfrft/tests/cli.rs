use std::path::Path;
use std::process::{Command, Output};

fn tvfrft(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvfrft")).args(args).current_dir(cwd).output().unwrap()
}

fn ok(out: Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const MODEL: [&str; 8] = ["--cycle", "6", "--times", "4", "--k-t", "2", "--k-g", "3"];

#[test]
fn select_then_reconstruct_recovers_noiseless_signal() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut args = vec!["select", "--strategy", "maxvol", "--m", "6", "--alpha", "0.4", "--beta", "-0.7", "--out", "plan.json"];
    args.extend(MODEL);
    ok(tvfrft(&args, d));
    let plan: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["indices"].as_array().unwrap().len(), 6);
    assert_eq!(plan["beta"], -0.7);
    assert_eq!(plan["band"].as_array().unwrap().len(), 6);

    let mut args = vec!["reconstruct", "--plan", "plan.json", "--sigma", "0", "--out", "report.json", "--estimate", "est.csv"];
    args.extend(MODEL);
    ok(tvfrft(&args, d));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert!(report["nmse"].as_f64().unwrap() < 1e-12);
    assert_eq!(report["path"], "direct");
    assert_eq!(report["cutoff"], 1e-10);
    assert_eq!(tvfrft::io::read_signal(&d.join("est.csv")).unwrap().n_vertices(), 6);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("c.json"), r#"{"sample_counts": [0, 6], "trials": 2, "strategies": ["maxvol"]}"#).unwrap();
    let mut args = vec!["sweep", "--config", "c.json", "--samples", "3", "--trials", "5"];
    args.extend(MODEL);
    let csv = ok(tvfrft(&args, d));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains(",maxvol,") && r.split(',').nth(8) == Some("2")));
}

#[test]
fn transform_dump_and_graph_build() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut args = vec!["transform", "--dump-transform", "j.csv"];
    args.extend(MODEL);
    ok(tvfrft(&args, d));
    let j = tvfrft::io::read_matrix(&d.join("j.csv")).unwrap();
    assert_eq!(j.shape(), (24, 24));

    let edges = ok(tvfrft(&["graph", "build", "--cycle", "4", "--product-times", "3"], d));
    assert_eq!(edges.lines().next(), Some("src,dst,weight"));
    // 3 copies of a 4-cycle plus 4 copies of a 3-cycle.
    assert_eq!(edges.lines().count() - 1, 3 * 4 + 4 * 3);

    std::fs::write(d.join("p.csv"), "x1,x2\n0,0\n0,0.1\n1,1\n").unwrap();
    let json = ok(tvfrft(&["graph", "build", "--points", "p.csv", "--sigma", "0.2", "--threshold", "0.01", "--format", "json"], d));
    let g: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(g["vertices"], 3);
    assert_eq!(g["edges"].as_array().unwrap().len(), 1);
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvfrft(&["sweep", "--cycle", "6", "--trials", "0"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));
    let out = tvfrft(&["reconstruct", "--plan", "missing.json", "--cycle", "6"], dir.path());
    assert!(!out.status.success());
}

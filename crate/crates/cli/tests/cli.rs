use std::fs;
use std::process::Command;

use fracosc_cli::{parse_grid, run};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracosc"))
}

fn run_to(dir: &tempfile::TempDir, name: &str, args: &[&str]) -> (i32, String) {
    let out = dir.path().join(name);
    let out_s = out.to_str().unwrap().to_string();
    let mut argv = vec!["fracosc"];
    argv.extend_from_slice(args);
    argv.push("--out");
    argv.push(&out_s);
    let code = run(argv);
    (code, fs::read_to_string(&out).unwrap_or_default())
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn ou_covariance_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(&dir, "c.csv", &["covariance", "--alpha", "1", "--gamma", "1", "--lambda", "1", "--t-grid", "0:0.1:5"]);
    assert_eq!(code, 0);
    assert!(!text.contains('\r'));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["t", "C"]);
    assert_eq!(rows.len(), 51);
    assert_eq!(rows[50][0], 5.0);
    let r = &rows[10];
    assert!((r[0] - 1.0).abs() < 1e-15);
    assert!((r[1] - (-1f64).exp() / 2.0).abs() < 1e-10 * r[1]);
}

#[test]
fn csv_cells_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let (_, text) = run_to(&dir, "s.csv", &["sigma2", "--alpha", "0.8", "--gamma", "1.2", "--lambda", "1.3", "--t-grid", "0.01,0.1,1,3.3"]);
    for line in text.lines().skip(1) {
        for cell in line.split(',') {
            let v: f64 = cell.parse().unwrap();
            assert_eq!(format!("{:.16e}", v), cell);
        }
    }
}

#[test]
fn casimir_json_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(&dir, "f.json", &["casimir", "--alpha", "1", "--gamma", "1", "--beta", "2", "--m", "1"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&text).unwrap();
    for key in ["config", "warnings", "data"] {
        assert!(doc.get(key).is_some(), "missing {}", key);
    }
    let f = doc["data"]["F"].as_f64().unwrap();
    assert!((f - 0.5 * (2.0 * 1f64.sinh()).ln()).abs() < 1e-9);
    assert_eq!(doc["config"]["subcommand"], "casimir");
    assert_eq!(doc["config"]["params"]["beta"], 2.0);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(&dir, "t.json", &["selftest"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["data"]["failed"], 0);
}

#[test]
fn exit_codes_and_messages() {
    let out = bin().args(["covariance", "--alpha", "0.5", "--gamma", "0.8", "--lambda", "1", "--t-grid", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("alpha*gamma <= 1/2: generalized regime not supported"), "{}", msg);

    let out = bin().args(["covariance", "--alpha", "1", "--gamma", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--lambda"));

    assert_eq!(bin().args(["frobnicate"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["sigma2", "--alpha", "1", "--gamma", "1", "--lambda", "1", "--t-grid", "1:0:2"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["--help"]).output().unwrap().status.code(), Some(0));
    assert_eq!(bin().args(["casimir", "--alpha", "1.5", "--gamma", "1", "--beta", "1", "--m", "1"]).output().unwrap().status.code(), Some(3));
}

#[test]
fn grid_syntax() {
    let g = parse_grid("0:0.1:1").unwrap();
    assert_eq!(g.len(), 11);
    assert_eq!(g[10], 1.0);
    assert_eq!(parse_grid("0:0.3:1").unwrap().len(), 4);
    assert_eq!(parse_grid("1,2.5,4").unwrap(), vec![1.0, 2.5, 4.0]);
    assert_eq!(parse_grid("7").unwrap(), vec![7.0]);
    assert!(parse_grid("1:2").is_err());
    assert!(parse_grid("2:0.1:1").is_err());
}

#[test]
fn simulated_path_round_trips_through_reader() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--alpha", "0.9", "--gamma", "1.3", "--lambda", "1", "--n", "512", "--dt", "0.05", "--seed", "11"];
    let (code, text) = run_to(&dir, "p.csv", &args);
    assert_eq!(code, 0);
    let path: fracosc::SamplePath64 = fracosc::simulate::read_csv(text.as_bytes()).unwrap();
    let p = fracosc::ProcessParams::new(0.9, 1.3, 1.0).unwrap();
    let direct: fracosc::SamplePath64 = fracosc::simulate::sample_path(&p, 512, 0.05, 11, fracosc::simulate::SynthesisMethod::Circulant).unwrap();
    assert_eq!(path.values, direct.values);

    let (_, again) = run_to(&dir, "p2.csv", &args);
    assert_eq!(text, again);

    let input = dir.path().join("p.csv");
    let (code, vtext) = run_to(
        &dir,
        "v.json",
        &["variogram", "--input", input.to_str().unwrap(), "--max-lag", "16", "--fit-lo", "0", "--fit-hi", "7", "--format", "json"],
    );
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&vtext).unwrap();
    assert_eq!(doc["data"]["rows"].as_array().unwrap().len(), 16);
    assert!(doc["data"]["hurst"]["h"].as_f64().unwrap() > 0.0);
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["sigma2", "--alpha", "0.7", "--gamma", "1.5", "--lambda", "1", "--t-grid", "0.05:0.05:2"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).env("FRACOSC_THREADS", "1").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_supplies_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"subcommand": "msd", "params": {"alpha": 1.0, "gamma": 1.0, "lambda": 2.0, "t_grid": "0.5,1,4"}, "format": "csv"}"#).unwrap();
    let (code, text) = run_to(&dir, "m.csv", &["msd", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["t", "msd", "leading"]);
    for r in rows {
        let (t, l) = (r[0], 2.0);
        let e = (t - (1.0 - (-l * t).exp()) / l) / (l * l);
        assert!((r[1] - e).abs() < 1e-9 * e, "t {}: {} vs {}", t, r[1], e);
    }
    // Command-line values win over the file.
    let (_, text) = run_to(&dir, "m2.csv", &["msd", "--config", cfg.to_str().unwrap(), "--t-grid", "2"]);
    assert_eq!(csv_rows(&text).1.len(), 1);
}

#[test]
fn sweep_columns_and_order() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(&dir, "w.csv", &["sweep", "--alphas", "0.3,0.5,0.7", "--scaled-beta", "0.5:0.5:2"]);
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["alpha", "gamma", "beta", "m", "beta_m_scaled", "F", "F_ren"]);
    assert_eq!(rows.len(), 12);
    assert_eq!((rows[0][0], rows[0][4]), (0.3, 0.5));
    assert_eq!((rows[11][0], rows[11][4]), (0.7, 2.0));
}

#[test]
fn asymptotic_comparison_table() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(&dir, "a.csv", &["asympt", "--alpha", "0.6", "--gamma", "1", "--lambda", "1", "--regime", "large", "--t-grid", "50,100"]);
    assert_eq!(code, 0);
    let (_, rows) = csv_rows(&text);
    assert!((rows[1][3] - 1.0).abs() < 0.02);
}

use std::path::{Path, PathBuf};
use std::process::Command as Process;

use heatcert::{run, Command, Problem, RunOptions};
use serde_json::Value;

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(report: &Value) {
    let v = schema();
    let errors: Vec<String> = v.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

fn heatcert(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_heatcert")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report_value(cmd: Command, path: &Path, threads: Option<usize>) -> Value {
    let loaded = Problem::load(path).unwrap();
    let report = run(cmd, &loaded, &RunOptions { threads, csv_dir: None }).unwrap();
    serde_json::to_value(&report).unwrap()
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

fn scalar(v: &Value, key: &str) -> f64 {
    v["constants"]["summary"][key]["value"].as_f64().unwrap()
}

#[test]
fn constants_command_prints_json() {
    let (code, stdout, stderr) = heatcert(&["constants", bundled("example_0pi.cfg").to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_valid(&v);
    assert_eq!(v["tool"]["name"], "heatcert");
    assert_eq!(v["command"], "constants");
    let summary = &v["constants"]["summary"];
    assert_eq!(summary["m"]["display"], "0.23");
    assert_eq!(summary["c1"]["display"], "0.38");
    assert_eq!(summary["C1"]["display"], "0.77");
    let bundle = &v["constants"]["bundle"];
    assert_eq!(bundle["c2"], summary["c2"]["value"]);
    assert_eq!(bundle["cap_c2"], summary["C2"]["value"]);
    let c1 = scalar(&v, "c1");
    let c2 = scalar(&v, "c2");
    let inf = v["constants"]["thresholds"]["u"]["inf"].as_f64().unwrap();
    assert_eq!(inf, (1.0 - c1) / c2);
}

#[test]
fn certify_zero_reactions_does_not_hold() {
    let cfg = bundled("example_0pi.cfg");
    let (code, stdout, stderr) = heatcert(&["certify", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_valid(&v);
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 1);
    assert_eq!(certs[0]["theorem"], "existence");
    assert_eq!(certs[0]["holds"], false);
    assert_eq!(certs[0]["conclusions"].as_array().unwrap().len(), 0);
    let lower = certs[0]["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "lower")
        .unwrap();
    assert_eq!(lower["holds"], false);

    let (code, _, _) = heatcert(&["certify", cfg.to_str().unwrap(), "--strict"]);
    assert_eq!(code, 2);
    let (code, _, _) = heatcert(&["certify", bundled("existence.cfg").to_str().unwrap(), "--strict"]);
    assert_eq!(code, 0);
}

#[test]
fn errors_exit_nonzero() {
    let (code, _, stderr) = heatcert(&["constants", "/nonexistent/problem.cfg"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("cannot read"), "{stderr}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    let text = std::fs::read_to_string(bundled("nonexistence.cfg")).unwrap();
    std::fs::write(&bad, text.replace("outer = \"u\"", "outer = \"3*u\"")).unwrap();
    let (code, _, stderr) = heatcert(&["certify", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("growth bound violated") && stderr.contains("u="), "{stderr}");

    let (code, _, stderr) = heatcert(&["solve", bundled("existence.cfg").to_str().unwrap(), "--nx", "1"]);
    assert_eq!(code, 1, "{stderr}");
}

#[test]
fn all_cross_links_solutions_to_asserted_boxes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("csv");
    let (code, _, stderr) = heatcert(&[
        "all",
        bundled("existence.cfg").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid(&v);
    assert_eq!(v["certificates"][0]["holds"], true);
    let runs = v["solve"]["runs"].as_array().unwrap();
    let linked: Vec<&Value> = runs.iter().filter(|r| !r["asserted_in"].as_array().unwrap().is_empty()).collect();
    assert!(!linked.is_empty());
    for r in &linked {
        assert_eq!(r["asserted_in"][0]["certificate"], 0);
        let loc = &r["localization"];
        assert!(loc["norm_u"].as_f64().unwrap() <= 20.0 && loc["floor_u"].as_f64().unwrap() > 1.0);
    }

    let files: Vec<&str> = v["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert!(files.contains(&"indicator.csv"));
    let distinct = v["solve"]["distinct"].as_array().unwrap().len();
    assert_eq!(files.iter().filter(|f| f.starts_with("solution_")).count(), distinct);
    let mut reader = csv::Reader::from_path(csv.join("solution_2.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["t", "x", "u", "v"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 101 * 65);
    assert_eq!(&rows[65][0], "0.01");
    let mut reader = csv::Reader::from_path(csv.join("indicator.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["t", "x", "value"]);
}

#[test]
fn scan_writes_rows_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = heatcert(&[
        "scan",
        bundled("example_0pi.cfg").to_str().unwrap(),
        "--steps",
        "5",
        "--csv",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_valid(&v);
    assert!(v.get("constants").is_none());
    let rows = v["scan"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(v["scan"]["argmin"], 2);
    let mut reader = csv::Reader::from_path(dir.path().join("scan.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["b", "m", "c1", "c2", "ratio"]);
    assert_eq!(reader.records().count(), 5);
}

#[test]
fn reports_match_across_thread_counts() {
    let path = bundled("existence.cfg");
    let one = without_timings(report_value(Command::All, &path, Some(1)));
    let four = without_timings(report_value(Command::All, &path, Some(4)));
    assert_eq!(one, four);
    let path = bundled("example_0pi.cfg");
    let one = without_timings(report_value(Command::Scan, &path, Some(1)));
    let three = without_timings(report_value(Command::Scan, &path, Some(3)));
    assert_eq!(one, three);
}

#[test]
fn echoed_config_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let first = report_value(Command::All, &bundled("three_solutions.cfg"), Some(2));
    assert_valid(&first);
    let echoed = dir.path().join("echo.cfg");
    std::fs::write(&echoed, first["problem"]["config"].as_str().unwrap()).unwrap();
    let second = report_value(Command::All, &echoed, Some(2));
    assert_eq!(without_timings(first), without_timings(second));
}

#[test]
fn overrides_are_echoed() {
    let (code, stdout, stderr) = heatcert(&[
        "constants",
        bundled("example_0pi.cfg").to_str().unwrap(),
        "--modes",
        "400",
        "--nx",
        "32",
        "--nt",
        "50",
        "--tol",
        "1e-8",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["constants"]["bundle"]["modes_used"], 400);
    let grid = &v["problem"]["grid"];
    assert_eq!((grid["nx"].as_u64(), grid["nt"].as_u64(), grid["modes"].as_u64()), (Some(32), Some(50), Some(31)));
    let settings = &v["problem"]["settings"];
    assert_eq!(settings["solver"]["tol"], 1e-8);
    assert_eq!(settings["solver"]["rng_seed"], 7);
    let echoed = Problem::from_toml_str(v["problem"]["config"].as_str().unwrap()).unwrap().problem;
    assert_eq!(echoed.constants.modes, Some(400));
}

#[test]
fn multipoint_problem_solves_and_refuses_certificates() {
    let v = report_value(Command::All, &bundled("multipoint.cfg"), None);
    assert_valid(&v);
    for c in v["certificates"].as_array().unwrap() {
        assert_eq!(c["holds"], false);
        assert!(c["notes"][0].as_str().unwrap().contains("integral"));
    }
    let snapped = v["problem"]["grid"]["snapped_times"]["alpha"].as_array().unwrap();
    assert_eq!(snapped.len(), 2);
    let runs = v["solve"]["runs"].as_array().unwrap();
    assert!(runs.iter().all(|r| r["status"] == "converged"));
    assert_eq!(v["solve"]["distinct"].as_array().unwrap().len(), 1);
}

#[test]
fn check_prints_a_loadable_file() {
    let (code, stdout, _) = heatcert(&["check", bundled("nested.cfg").to_str().unwrap()]);
    assert_eq!(code, 0);
    let original = Problem::load(bundled("nested.cfg")).unwrap().problem;
    assert_eq!(Problem::from_toml_str(&stdout).unwrap().problem, original);
}

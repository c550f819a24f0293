use std::process::{Command, Output};

use serde_json::Value;

fn rank1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rank1")).args(args).env_remove("RANK1_MAX_STAGE").output().unwrap()
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let out = rank1(args);
    let code = out.status.code().unwrap();
    (code, serde_json::from_slice(&out.stdout).unwrap_or(Value::Null))
}

#[test]
fn halving_limit_passes_with_zero_deviation() {
    let (code, report) =
        json_report(&["run", "limits", "--family", "utv1", "--seq", "h_j", "--poly", "1/2*T^0", "--j", "3..8"]);
    assert_eq!(code, 0);
    assert_eq!(report["status"], "PASS");
    assert_eq!(report["result"]["max_deviation"], "0/1");
    assert_eq!(report["result"]["rows"].as_array().unwrap().len(), 18);
    assert_eq!(report["tool"], "rank1");
}

#[test]
fn geometry_height_at_stage_five() {
    let (code, report) = json_report(&["run", "geometry", "--family", "utv1", "--j", "5"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["stages"][0]["h"], "720");
    assert_eq!(report["config"]["experiment"]["geometry"]["j"], "5");
}

#[test]
fn wrong_prediction_fails() {
    let (code, report) = json_report(&["limits", "--seq", "h_j", "--poly", "1/3*T^0", "--j", "3..4"]);
    assert_eq!(code, 1);
    assert_eq!(report["status"], "FAIL");
}

#[test]
fn starved_budget_is_inconclusive() {
    let (code, report) = json_report(&["--max-stage", "1", "measure", "--family", "toy", "--a", "stage=1; levels=0", "--n", "5"]);
    assert_eq!(code, 3);
    assert_eq!(report["status"], "INCONCLUSIVE");
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(rank1(&["astrology"]).status.code(), Some(2));
    assert_eq!(rank1(&["geometry", "--family", "chacon"]).status.code(), Some(2));
    assert_eq!(rank1(&["run"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"experiment": {"geometry": {}}, "colour": "red"}"#).unwrap();
    let out = rank1(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn config_file_drives_the_run_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("eq4.json");
    let out = dir.path().join("eq4.csv");
    std::fs::write(
        &config,
        format!(r#"{{"experiment": {{"eq4": {{"columns": 2, "p": 1}}}}, "out": "{}"}}"#, out.display()),
    )
    .unwrap();
    let run = rank1(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# tool: rank1"));
    assert!(lines.next().unwrap().contains("\"eq4\""));
    assert_eq!(lines.next().unwrap(), "# status: PASS");
    assert_eq!(lines.next().unwrap(), "stage,n,power,value,prediction,deviation_hi,status");
    assert!(text.contains("6,1,-15867,1/9,1/9,0/1,PASS"));
}

#[test]
fn product_scan_reports_the_first_return() {
    let (code, report) = json_report(&["products", "scan", "--family", "thm2(2)", "--k-range", "453..453"]);
    assert_eq!(code, 1);
    assert_eq!(report["result"]["report"]["verdict"], "NONZERO");
    assert_eq!(report["result"]["report"]["nonzero"][0]["product"]["lo"], "2/19683");
}

#[test]
fn tall_top_spacer_gives_zero_returns() {
    let family = r#"{"h1": 2, "stages": {"r": 3, "spacers": ["zero", "sigma", {"rule": "c_times_h", "c": 8}]}}"#;
    let (code, report) = json_report(&["products", "--family", family, "--j", "4", "--samples", "64"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["report"]["verdict"], "PROVEN_ZERO");
}

#[test]
fn acceptance_subset() {
    let (code, report) = json_report(&["acceptance", "--only", "2,3"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"].as_array().unwrap().len(), 2);
}

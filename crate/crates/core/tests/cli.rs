use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goodlattice"))
        .args(args)
        .env("GOODLATTICE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cf_human_and_csv() {
    let o = run(&["cf", "13", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2,1,1,2"));

    let o = run(&["cf", "7", "--all", "--csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,a,len,sum,max,quotients"));
    assert_eq!(lines.next(), Some("7,1,1,7,7,7"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn json_report_shape() {
    let o = run(&["discrepancy", "3", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "discrepancy");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["results"]["value"], "5/3");
    assert_eq!(v["parameters"]["threads"], 2);
    assert!(v["wall_time_ms"].as_f64().unwrap() >= 0.0);
    assert!(v["version"].is_string());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["cf", "12", "5"][..],
        &["cf", "13", "0"],
        &["discrepancy", "7"],
        &["subgroup", "7", "--order", "4"],
        &["verify", "10..x", "--theorem", "1"],
        &["charsum", "7", "--char", "0", "--lemma1", "2"],
        &["--max-p-exact", "100", "discrepancy", "101", "2"],
        &["--max-p-dlog", "100", "charsum", "101", "--sweep", "--interval", "5"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn non_divisor_orders_are_skipped_with_warning() {
    let o = run(&["verify", "101..113", "--order", "4", "--theorem", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.contains("skipping p = 103"));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"]["skipped"], serde_json::json!([103, 107]));
    assert_eq!(v["results"]["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn every_verify_mode_runs() {
    for theorem in ["1", "2", "corollary", "lemma1", "burgess", "proofstep"] {
        let o = run(&["verify", "29..43", "--theorem", theorem, "--csv"]);
        assert_eq!(o.status.code(), Some(0), "{theorem}");
        let text = stdout(&o);
        assert!(text.lines().next().unwrap().starts_with("p,"), "{theorem}");
        assert!(text.lines().count() > 4, "{theorem}");
    }
}

#[test]
fn charsum_values() {
    let o = run(&["charsum", "7", "--char", "3", "--interval", "3", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["results"]["rows"][0]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let o = run(&["charsum", "101", "--sweep", "--lemma1", "73.85", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"]["rectangles"], 13);
    assert!((v["results"]["max_abs"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn output_is_repeatable() {
    let args = ["verify", "200..260", "--index", "2", "--theorem", "1", "--csv"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

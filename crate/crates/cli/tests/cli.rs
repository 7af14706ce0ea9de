use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn modsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modsym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn cf_lists_quotients_and_convergents() {
    let out = modsym(&["cf", "3/7"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["command"], "cf");
    assert_eq!(v["result"]["quotients"], serde_json::json!([2, 3]));
    assert_eq!(v["result"]["convergents"], serde_json::json!(["0/1", "1/2", "3/7"]));

    let zero = json(&modsym(&["cf", "0/1"]));
    assert_eq!(zero["result"]["quotients"], serde_json::json!([]));
}

#[test]
fn cf_rejects_bad_input() {
    let out = modsym(&["cf", "7/3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("[0, 1)"), "{}", stderr(&out));

    let out = modsym(&["cf", "3/x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("at byte 2"), "{}", stderr(&out));
}

#[test]
fn chain_matrices_and_signs() {
    let v = json(&modsym(&["chain", "-3/7"]));
    let steps = v["result"]["steps"].as_array().unwrap();
    let signs: Vec<&str> = steps.iter().map(|s| s["sign"].as_str().unwrap()).collect();
    assert_eq!(signs, ["+", "-", "+"]);
    let mats: Vec<&Value> = steps.iter().map(|s| &s["matrix"]).collect();
    assert_eq!(*mats[0], serde_json::json!([[1, 0], [0, 1]]));
    assert_eq!(*mats[1], serde_json::json!([[1, 0], [2, 1]]));
    assert_eq!(*mats[2], serde_json::json!([[7, 3], [2, 1]]));
    assert_eq!(v["diagnostics"]["tiles_exactly"], true);

    let v = json(&modsym(&["chain", "0"]));
    let steps = v["result"]["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0]["matrix"], serde_json::json!([[1, 0], [0, 1]]));

    let out = modsym(&["chain", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("left"), "{}", stderr(&out));
}

fn without_timestamp(mut v: Value) -> String {
    v.as_object_mut().unwrap().remove("timestamp");
    serde_json::to_string_pretty(&v).unwrap()
}

#[test]
fn output_is_deterministic_apart_from_the_timestamp() {
    let args = ["hecke", "check", "--s", "0.8,2", "--z", "1.2,0.3", "--z", "2,0"];
    let a = json(&modsym(&args));
    let b = json(&modsym(&args));
    assert!(a["timestamp"].is_object());
    assert_eq!(without_timestamp(a), without_timestamp(b));
}

#[test]
fn csv_output_is_a_table() {
    let out = modsym(&[
        "measure", "eval", "--alpha", "inf", "--beta", "-3/7", "--z", "1,0.5", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z_re,z_im,mu_re,mu_im"));
    assert_eq!(lines.count(), 1);
}

#[test]
fn missed_tolerance_gives_exit_code_one() {
    let out = modsym(&["hecke", "check", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["ok"], false);
}

#[test]
fn invalid_configuration_is_rejected() {
    assert_eq!(modsym(&["cf", "1/2", "--basis", "0"]).status.code(), Some(2));
    assert_eq!(modsym(&["cf", "1/2", "--tol", "-1"]).status.code(), Some(2));
    assert_ne!(modsym(&["cf", "1/2", "--z", "1,2,3"]).status.code(), Some(0));
}

fn cache_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    names
}

#[test]
fn scan_caches_and_periodfn_reuses_the_datum() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let out = modsym(&[
        "transfer",
        "scan",
        "--parity",
        "even",
        "--r-lo",
        "13",
        "--r-hi",
        "14.5",
        "--basis",
        "60",
        "--cache-dir",
        cache,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let hits = json(&out)["result"]["hits"].as_array().unwrap().clone();
    assert_eq!(hits.len(), 1);
    let r = hits[0]["r"].as_f64().unwrap();
    assert!((r - 13.78).abs() < 1e-2, "{r}");
    assert_eq!(cache_files(dir.path()), vec![format!("eigen_1_{r:.6}_60.json")]);

    let out = modsym(&[
        "transfer",
        "periodfn",
        "--parity",
        "even",
        "--r",
        "13.78",
        "--basis",
        "60",
        "--cache-dir",
        cache,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["diagnostics"]["datum"]["cache"], "hit");
    assert!(v["diagnostics"]["three_term_residual"].as_f64().unwrap() <= 1e-5);
    let psi = &v["result"]["samples"][3]["psi"];
    assert_eq!(v["result"]["samples"][3]["z"]["re"], 1.5);
    assert!((psi["re"].as_f64().unwrap() - 1.0).abs() < 1e-12 && psi["im"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn corrupt_cache_entry_is_reported_and_replaced() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let name = "eigen_-1_9.533695_40.json";
    std::fs::write(dir.path().join(name), "{\"r\": 9.5").unwrap();
    let args = [
        "transfer",
        "periodfn",
        "--parity",
        "odd",
        "--r",
        "9.533695",
        "--cache-dir",
        cache,
    ];
    let v = json(&modsym(&args));
    assert_eq!(v["diagnostics"]["datum"]["cache"], "miss");
    assert_eq!(
        v["diagnostics"]["datum"]["corrupt_entries"].as_array().unwrap().len(),
        1
    );
    let v = json(&modsym(&args));
    assert_eq!(v["diagnostics"]["datum"]["cache"], "hit");
    assert_eq!(cache_files(dir.path()), vec![name.to_string()]);
}

#[test]
fn empty_scan_succeeds() {
    let out = modsym(&["transfer", "scan", "--parity", "even", "--r-lo", "1", "--r-hi", "5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(json(&out)["result"]["hits"], serde_json::json!([]));
}

fn suite(name: &str) -> Value {
    let out = modsym(&["suite", name]);
    assert!(
        out.status.success(),
        "suite {name} failed: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    json(&out)
}

#[test]
fn suites_pass() {
    for name in ["measure", "hecke", "levy", "classical"] {
        let v = suite(name);
        assert!(v["result"]["criteria"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["pass"] == true));
    }
}

#[test]
fn brjuno_suite_reports_the_golden_ratio_value() {
    let v = suite("brjuno");
    let golden = v["result"]["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"].as_str().unwrap().contains("golden"))
        .unwrap()
        .clone();
    assert!(golden["measured"].as_f64().unwrap() <= 1e-6);

    let direct = json(&modsym(&["brjuno", "0.6180339887498949"]));
    assert!((direct["result"]["big_b"]["value"].as_f64().unwrap() - 1.259_829_6).abs() < 1e-6);
}

#[test]
fn lderiv_matches_its_series() {
    let v = json(&modsym(&["lderiv"]));
    let mellin = v["result"]["l_prime"].as_f64().unwrap();
    let series = v["result"]["l_prime_series"].as_f64().unwrap();
    assert!((mellin - series).abs() < 1e-3, "{mellin} vs {series}");
}

#[test]
fn classical_symbols_are_modular() {
    let out = modsym(&[
        "symbols",
        "classical",
        "--alpha",
        "-1/2",
        "--beta",
        "0",
        "--g",
        "2,1,1,1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["result"]["coefficients"].as_array().unwrap().len(), 11);
    assert!(v["diagnostics"]["modularity_gap"].as_f64().unwrap() < 1e-8);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn trapkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapkit")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = trapkit(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_reports_exact_rates() {
    let pentagon = data("pentagon.json");
    assert_eq!(json(&["analyze", &pentagon, "--errors", "all-xy"])["rate"], "2/5");
    assert_eq!(json(&["analyze", &pentagon, "--errors", "z-only"])["delta"], "0");
    assert_eq!(json(&["analyze", &data("k2-general.json"), "--errors", "all-xy"])["rate"], "1/2");
    let all = json(&["analyze", &pentagon, "--errors", "all-pauli"]);
    // Z-only deviations are in the set and never reject.
    assert_eq!((all["rate"].as_str(), all["delta"].as_str()), (Some("0"), Some("1")));
}

#[test]
fn analyze_accepts_an_explicit_deviation_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("devs.json");
    std::fs::write(&path, r#"{"deviations": [{"0": "X", "2": "X"}, {"1": "Z"}]}"#).unwrap();
    let r = json(&["analyze", &data("pentagon.json"), "--errors", path.to_str().unwrap()]);
    // {0, 2} hits three of the five maximum independent sets; Z on 1 is invisible.
    assert_eq!((r["epsilon"].as_str(), r["delta"].as_str()), (Some("1"), Some("3/5")));
}

#[test]
fn optimize_matches_known_optima() {
    let c5 = data("c5.json");
    assert_eq!(json(&["optimize", &c5, "--family", "standard"])["rate"], "2/5");
    assert_eq!(json(&["optimize", &c5, "--family", "general"])["rate"], "16/31");
    assert_eq!(json(&["optimize", &c5, "--family", "colouring"])["rate"], "2/5");
    assert_eq!(json(&["optimize", &data("k3.json")])["rate"], "1/3");
}

#[test]
fn optimize_emits_a_scheme_that_analyze_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("opt.json");
    let csv = dir.path().join("opt.csv");
    json(&["optimize", &data("c5.json"), "--emit-scheme", scheme.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(json(&["analyze", scheme.to_str().unwrap()])["rate"], "2/5");
    let table = std::fs::read_to_string(csv).unwrap();
    assert!(table.starts_with("set,weight\n") && table.lines().count() > 1);
}

#[test]
fn bounds_report_chi_and_name_failing_inequalities() {
    let r = json(&["bounds", &data("params.json")]);
    for k in ["epsilon", "delta", "nu", "nu_alt"] {
        assert!(r[k]["value"].is_number(), "{k}");
        assert!(r[k]["chi"].is_number(), "{k}");
    }
    let bad = trapkit(&["bounds", &data("params-inadmissible.json")]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("w/(s(1-eps)) < k_eps/n"));
    let par = json(&["bounds", &data("params-parallel.json"), "--parallel"]);
    assert_eq!(par["mode"], "parallel");
    assert!(par["epsilon"].as_f64().unwrap() < 1.0);
}

#[test]
fn cap_exceeded_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.json");
    std::fs::write(&path, r#"{"graph": {"family": "cycle", "n": 13}, "canvases": [{"kind": "standard", "h": [0]}]}"#).unwrap();
    assert_eq!(trapkit(&["analyze", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn stochastic_commands_need_a_seed() {
    let out = trapkit(&["simulate", &data("pentagon.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn deterministic_output_is_byte_identical_across_job_counts() {
    let run = |jobs: &str| {
        let out = trapkit(&[
            "simulate",
            &data("pentagon.json"),
            "--adversary",
            &data("pentagon-attack.json"),
            "--seed",
            "11",
            "--trials",
            "3000",
            "--jobs",
            jobs,
            "--deterministic",
        ]);
        assert!(out.status.success());
        out.stdout
    };
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("3"));
    assert!(!String::from_utf8_lossy(&a).contains("generated_at"));
}

#[test]
fn simulate_honest_and_dual_attack() {
    let honest = json(&["simulate", &data("pentagon.json"), "--seed", "1", "--trials", "500"]);
    assert_eq!(honest["accept"]["estimate"], 1.0);
    let r = json(&["simulate", &data("pentagon.json"), "--adversary", &data("pentagon-attack.json"), "--seed", "2", "--trials", "20000", "--jobs", "4"]);
    let (est, sigma) = (r["accept"]["estimate"].as_f64().unwrap(), r["accept"]["sigma"].as_f64().unwrap());
    assert!((est - 0.6).abs() < 3.0 * sigma, "{est} ± {sigma}");
}

#[test]
fn distinguish_separates_worlds_only_under_attack() {
    let common = ["distinguish", &data("grid-line.json"), "--computation", &data("line3.json"), "--trials", "4000", "--jobs", "4"];
    let mut honest = common.to_vec();
    honest.extend(["--seed", "3"]);
    let r = json(&honest);
    assert!(r["advantage"].as_f64().unwrap() < 3.0 * r["sigma"].as_f64().unwrap() + 0.01);
    let attack = data("grid-attack.json");
    let mut bad = common.to_vec();
    bad.extend(["--seed", "3", "--adversary", &attack]);
    let r = json(&bad);
    let (adv, sigma) = (r["advantage"].as_f64().unwrap(), r["sigma"].as_f64().unwrap());
    assert!((adv - 0.5).abs() < 4.0 * sigma + 0.01, "{adv} ± {sigma}");
}

#[test]
fn validate_lints_each_file_kind() {
    for f in ["pentagon.json", "k2-general.json", "c5.json", "line3.json", "grid-line.json"] {
        assert_eq!(json(&["validate", &data(f)])["valid"], true, "{f}");
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"graph": {"family": "cycle", "n": 5}, "canvases": [{"kind": "standard", "h": [0, 1]}]}"#).unwrap();
    assert_eq!(trapkit(&["validate", path.to_str().unwrap()]).status.code(), Some(1));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn infoflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infoflow"))
        .args(args)
        .env("INFOFLOW_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = infoflow(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Data rows of a CSV report, without the config comment and header.
fn rows(p: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# run_config: {"));
    assert_eq!(lines.next().unwrap(), "lag,from,to,statistic_bits,p_value,significant");
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn topologies_lists_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "t.json");
    ok(&["topologies", "--n-vars", "3", "--output", s(&out)]);
    let v = json(&out);
    assert_eq!(v["result"]["n_classes"], 16);
    assert_eq!(v["run_config"]["n_vars"], 3);
    assert_eq!(v["result"]["classes"][0]["graph"]["edges"].as_array().unwrap().len(), 0);
    let total: u64 = v["result"]["classes"].as_array().unwrap().iter().map(|c| c["size"].as_u64().unwrap()).sum();
    assert_eq!(total, 64);
    assert_eq!(infoflow(&["topologies", "--n-vars", "6"]).status.code(), Some(1));
}

#[test]
fn simulate_symbolize_and_infer_a_chain() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(dir.path(), "ctml.csv");
    let again = path(dir.path(), "ctml2.csv");
    let args = ["simulate", "ctml", "--n-vars", "3", "--edges", "0>1", "--steps", "20000", "--seed", "4"];
    ok(&[&args[..], &["--output", s(&data)]].concat());
    ok(&[&args[..], &["--output", s(&again)]].concat());
    let a = std::fs::read_to_string(&data).unwrap();
    let b = std::fs::read_to_string(&again).unwrap();
    // identical apart from the output path recorded in the config line
    assert_eq!(a.lines().skip(1).collect::<Vec<_>>(), b.lines().skip(1).collect::<Vec<_>>());
    assert!(a.lines().nth(1).unwrap() == "x0,x1,x2");

    let sym = path(dir.path(), "sym.csv");
    ok(&["symbolize", "--input", s(&data), "--output", s(&sym)]);
    let text = std::fs::read_to_string(&sym).unwrap();
    assert_eq!(text.lines().count(), 20_002);
    assert!(text.lines().skip(2).all(|l| l.split(',').all(|c| c == "0" || c == "1")));

    let report = path(dir.path(), "report.csv");
    ok(&["infer", "--input", s(&sym), "--symbols", "--order", "1", "--surrogates", "200", "--seed", "1", "--output", s(&report)]);
    let r = rows(&report);
    assert_eq!(r.len(), 6);
    for row in &r {
        let edge = (row[1].as_str(), row[2].as_str());
        assert_eq!(row[5] == "true", edge == ("x0", "x1"), "{row:?}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(dir.path(), "d.csv");
    ok(&["simulate", "ctml", "--n-vars", "2", "--steps", "3000", "--output", s(&data)]);
    let cfg = path(dir.path(), "cfg.json");
    std::fs::write(&cfg, r#"{"order": 3, "surrogates": 20, "mode": "pte", "seed": 9}"#).unwrap();
    let report = path(dir.path(), "r.csv");
    ok(&["infer", "--config", s(&cfg), "--input", s(&data), "--order", "1", "--output", s(&report)]);
    let text = std::fs::read_to_string(&report).unwrap();
    let line = text.lines().next().unwrap().trim_start_matches("# run_config: ");
    let config: Value = serde_json::from_str(line).unwrap();
    assert_eq!(config["order"], 1);
    assert_eq!(config["surrogates"], 20);
    assert_eq!(config["mode"], "pte");
    assert_eq!(config["seed"], 9);
    assert_eq!(config["alpha"], 0.01);

    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(infoflow(&["infer", "--config", s(&cfg), "--input", s(&data)]).status.code(), Some(1));
}

#[test]
fn lag_sweep_on_independent_noise_is_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(dir.path(), "noise.csv");
    // two uncoupled tent maps are independent chaotic sources
    ok(&["simulate", "ctml", "--n-vars", "2", "--steps", "10000", "--seed", "12", "--output", s(&data)]);
    let report = path(dir.path(), "sweep.csv");
    ok(&["lag-sweep", "--input", s(&data), "--lags", "1", "--order", "1", "--seed", "3", "--output", s(&report)]);
    let r = rows(&report);
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|row| row[0] == "1" && row[5] == "false"), "{r:?}");
}

#[test]
fn network_reports_bits_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(dir.path(), "d.csv");
    ok(&["simulate", "ctml", "--n-vars", "2", "--edges", "0>1", "--steps", "20000", "--output", s(&data)]);
    let out = path(dir.path(), "net.json");
    ok(&["network", "--input", s(&data), "--order", "2", "--output", s(&out)]);
    let v = json(&out);
    let net = &v["result"]["network"];
    assert_eq!(net["units"], "bits/step");
    assert_eq!(v["result"]["names"][1], "x1");
    let forward = net["transfer"][0][1].as_f64().unwrap();
    let backward = net["transfer"][1][0].as_f64().unwrap();
    assert!(forward > 10.0 * backward, "{forward} vs {backward}");
    assert!(net["transfer"][0][0].is_null());
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "v.json");
    ok(&["verify", "--suite", "lemmas", "--trials", "20", "--output", s(&out)]);
    let v = json(&out);
    assert_eq!(v["result"]["summary"]["passed"], true);
    assert!(v["result"]["summary"]["max_hard_gap"].as_f64().unwrap() < 1e-9);
    ok(&["verify", "--suite", "network", "--trials", "20", "--n-vars", "2", "--output", s(&out)]);
    assert_eq!(json(&out)["result"]["summary"]["hard_failures"], 0);
}

#[test]
fn decoupled_benchmark_infers_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "b.json");
    let cases = path(dir.path(), "cases.csv");
    ok(&[
        "bench-table1", "--n-vars", "3", "--epsilon", "0", "--steps", "5000", "--order", "1",
        "--surrogates", "100", "--seed", "5", "--output", s(&out), "--cases-output", s(&cases),
    ]);
    let v = json(&out);
    let cases_json = v["result"]["cases"].as_array().unwrap();
    assert_eq!(cases_json.len(), 16);
    assert!(cases_json.iter().all(|c| c["mte"]["edges"].as_array().unwrap().is_empty()));
    assert_eq!(v["result"]["mte"]["n_pairs"], 96);
    let text = std::fs::read_to_string(&cases).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "case,code,truth,mte,pte,mte_correct,pte_correct");
    assert_eq!(text.lines().count(), 18);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(infoflow(&["infer", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(infoflow(&["infer"]).status.code(), Some(1));
    assert_eq!(infoflow(&["--help"]).status.code(), Some(0));
    let bad = path(dir.path(), "bad.csv");
    std::fs::write(&bad, "a,b\n1,oops\n").unwrap();
    assert_eq!(infoflow(&["infer", "--input", s(&bad)]).status.code(), Some(2));
    let missing = path(dir.path(), "missing.csv");
    assert_eq!(infoflow(&["network", "--input", s(&missing)]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_infoflow"))
        .args(["topologies"])
        .env("INFOFLOW_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_lorenz_writes_the_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "l.csv");
    ok(&["simulate", "lorenz", "--dt", "0.05", "--samples", "200", "--seed", "1", "--output", s(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    let config: Value = serde_json::from_str(text.lines().next().unwrap().trim_start_matches("# run_config: ")).unwrap();
    assert_eq!(config["dt"], 0.05);
    assert_eq!(config["params"]["rho"], 28.0);
    assert_eq!(text.lines().nth(1).unwrap(), "x,y,z");
    assert_eq!(text.lines().count(), 202);
}

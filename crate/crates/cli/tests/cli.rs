use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kttree"))
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(golden_dir().join(name)).unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "kttree {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn stdout_matches_golden(args: &[&str], name: &str) {
    let got = run_ok(args);
    let want = golden(name);
    // stdout gets a trailing newline when the payload lacks one
    assert_eq!(got.trim_end_matches('\n'), want.trim_end_matches('\n'), "{name}");
}

#[test]
fn construct_dot() {
    stdout_matches_golden(
        &["construct", "--kind", "t2", "--a", "5", "--b", "7", "--format", "dot"],
        "construct_t2_5_7.dot",
    );
}

#[test]
fn construct_json_round_trips() {
    let got = run_ok(&["construct", "--kind", "type2", "--t", "3", "--a", "2", "--b", "6"]);
    let v: serde_json::Value = serde_json::from_str(&got).unwrap();
    assert!(v["n"].as_u64().unwrap() > 0);
    assert!(v["roots"].as_array().is_some());
}

#[test]
fn density_unbalanced_spike() {
    stdout_matches_golden(
        &["density", "--kind", "t3-spike", "--a", "1", "--b", "3"],
        "density_spike_1_3.json",
    );
}

#[test]
fn plan_json() {
    stdout_matches_golden(&["plan", "--t", "3", "--exponent", "7/3"], "plan_3_7over3.json");
    stdout_matches_golden(
        &["plan", "--t", "3", "--exponent", "10/3", "--stars"],
        "plan_stars_3_10over3.json",
    );
}

#[test]
fn witness_json() {
    stdout_matches_golden(
        &["witness", "--kind", "type1", "--t", "3", "--a", "1", "--b", "2", "--s", "1"],
        "witness_type1.json",
    );
}

#[test]
fn power_json() {
    stdout_matches_golden(
        &["power", "--kind", "t2", "--a", "1", "--b", "2", "--ell", "2"],
        "power_t2_ell2.json",
    );
}

#[test]
fn count_subcommands() {
    let host = golden_dir().join("host_type1.json");
    let host = host.to_str().unwrap();
    stdout_matches_golden(
        &["count", "--in", host, "cliques", "--i", "3"],
        "count_cliques.json",
    );
    stdout_matches_golden(
        &[
            "count", "--in", host, "witness", "--kind", "type1", "--t", "3", "--a", "1",
            "--b", "2", "--s", "1",
        ],
        "count_witness.json",
    );
    let rooted = run_ok(&[
        "count", "--in", host, "rooted", "--kind", "t2", "--a", "1", "--b", "2", "--ell", "1",
    ]);
    let v: serde_json::Value = serde_json::from_str(&rooted).unwrap();
    assert!(v["rows"].as_array().unwrap().len() > 0);
    assert!(!v["power_member"].is_null());
}

#[test]
fn prune_json() {
    let input = golden_dir().join("complex_in.json");
    stdout_matches_golden(
        &["prune", "--in", input.to_str().unwrap(), "--thresholds", "2,2"],
        "prune_out.json",
    );
}

#[test]
fn experiment_csv_deterministic() {
    let cfg = golden_dir().join("experiment_cfg.json");
    let cfg = cfg.to_str().unwrap();
    let a = run_ok(&["experiment", "--config", cfg]);
    let b = run_ok(&["experiment", "--config", cfg]);
    assert_eq!(a, b);
    assert_eq!(a.trim_end_matches('\n'), golden("experiment_out.csv").trim_end_matches('\n'));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    run_ok(&[
        "construct", "--kind", "t2", "--a", "5", "--b", "7", "--format", "dot", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), golden("construct_t2_5_7.dot"));
}

fn exit_code(args: &[&str]) -> i32 {
    let out: Output = bin().args(args).output().unwrap();
    out.status.code().unwrap()
}

#[test]
fn exit_codes() {
    // usage / malformed input -> 2 (clap errors also exit 2)
    assert_eq!(exit_code(&["construct", "--kind", "nope"]), 2);
    assert_eq!(exit_code(&["construct", "--kind", "t2", "--a", "1"]), 2);
    // cap exceeded -> 3
    assert_eq!(
        exit_code(&["power", "--kind", "t2", "--a", "5", "--b", "7", "--ell", "3"]),
        3
    );
    // infeasible parameters -> 4
    assert_eq!(exit_code(&["construct", "--kind", "t2", "--a", "7", "--b", "5"]), 4);
    assert_eq!(exit_code(&["plan", "--t", "3", "--exponent", "5"]), 4);
}

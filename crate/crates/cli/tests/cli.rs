use std::fs;
use std::process::{Command, Output};

fn unibandit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unibandit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL: &str = "\
horizon = 2000
runs = 3
seed = 11
checkpoints = 500, 2000

[environment]
kind = stationary
graph = line(5)
means = 0.2, 0.4, 0.8, 0.5, 0.3

[policy]
name = klucb

[policy]
name = osub
label = osub-c0
c = 0
";

#[test]
fn lower_bound_on_the_seventeen_arm_triangle() {
    let means = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1";
    let out = unibandit(&["lower-bound", "--line", "17", "--means", means]);
    assert!(out.status.success(), "{}", stderr(&out));
    let c: f64 = stdout(&out).trim().parse().unwrap();
    assert!((c - 4.504_199_397).abs() < 1e-6, "{c}");
}

#[test]
fn lower_bound_from_an_edge_list() {
    let out = unibandit(&["lower-bound", "--edges", "1-2", "--means", "0.4,0.6"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let c: f64 = stdout(&out).trim().parse().unwrap();
    assert!((c - 2.466_303_462).abs() < 1e-6, "{c}");

    let bad = unibandit(&["lower-bound", "--edges", "1:2", "--means", "0.8,0.9"]);
    assert!(!bad.status.success());
    assert!(stderr(&bad).contains("not of the form"));
}

#[test]
fn missing_config_is_reported() {
    let out = unibandit(&["run", "--config", "/definitely/not/here.cfg"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("config not found"), "{}", stderr(&out));
}

#[test]
fn unknown_flags_are_rejected() {
    let out = unibandit(&["table1", "--frobnicate"]);
    assert!(!out.status.success());
}

#[test]
fn run_writes_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    let csv = dir.path().join("out.csv");
    fs::write(&cfg, SMALL).unwrap();
    let out = unibandit(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "policy,T,mean_regret,std_regret,regret_per_logT,runs");
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().any(|l| l.starts_with("osub-c0,2000,")));
    assert!(lines[1..].iter().all(|l| l.ends_with(",3")));
}

#[test]
fn run_overrides_change_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(&cfg, SMALL).unwrap();
    let path = cfg.to_str().unwrap();
    let a = unibandit(&["run", "--config", path]);
    let b = unibandit(&["run", "--config", path, "--threads", "2"]);
    let c = unibandit(&["run", "--config", path, "--seed", "12", "--runs", "4"]);
    assert!(a.status.success() && b.status.success() && c.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
    assert!(stdout(&c).lines().skip(1).all(|l| l.ends_with(",4")));
}

#[test]
fn table1_emits_one_row_per_policy_and_checkpoint() {
    let out = unibandit(&["table1", "--horizon", "10000", "--runs", "2", "--seed", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    // checkpoints 1e3 and 1e4 for four policies
    assert_eq!(text.lines().count(), 1 + 8);
    for name in ["ucb", "klucb", "ucbu", "osub"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name},10000,"))));
    }
}

#[test]
fn sweep_sigma_labels_rows_by_speed() {
    let out = unibandit(&["sweep-sigma", "--sigmas", "0.01", "--runs", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(text.lines().skip(1).all(|l| l.contains("@sigma=0.01,2000,")));
}

#[test]
fn concentration_check_stays_within_the_bound() {
    let out = unibandit(&["validate-concentration", "--trials", "2000", "--seed", "5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn concentration_check_rejects_bad_parameters() {
    let out = unibandit(&["validate-concentration", "--deviation=-0.1", "--trials", "10"]);
    assert!(!out.status.success());
    assert!(stderr(&out).starts_with("error:"), "{}", stderr(&out));
}

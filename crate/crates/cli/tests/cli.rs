use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    format!("{}/../../corpus/{name}.gog", env!("CARGO_MANIFEST_DIR"))
}

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgam-lab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--emit", "json"]);
    let out = lab(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("amalgam-lab-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn validate_dihedral() {
    let out = lab(&["validate", &corpus("dinf")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("< a, b | a^2, b^2 >"));
    assert!(text.contains("SimplyElementary(IndexTwoEdge)"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(lab(&[]).status.code(), Some(1));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lab(&["ends", &corpus("f2")]).status.code(), Some(1));
    assert_eq!(lab(&["ends", &corpus("f2"), "--radii", "3,2"]).status.code(), Some(1));
    assert_eq!(lab(&["boundary", &corpus("f2"), "--depth", "2", "--emit", "gap"]).status.code(), Some(1));
    assert_eq!(lab(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_name_their_module() {
    let path = scratch("bad.gog");
    std::fs::write(&path, "vertex v cyclic 2 gens [a]\nedge e v -- w group trivial embed_fwd {} embed_bwd {}\n").unwrap();
    let out = lab(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error[gog::UnknownVertex]"), "{err}");
    assert!(err.contains("line 2"));
}

#[test]
fn budget_errors_name_their_module() {
    let out = lab(&["cayley-ball", &corpus("f2"), "--radius", "8", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error[fundgroup::BudgetExceeded]"));
}

#[test]
fn inconclusive_ends_exit_two_with_report() {
    let out = lab(&["ends", &corpus("z2xz"), "--radii", "0,1", "--emit", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["verdict"], "inconclusive");
}

#[test]
fn free_group_has_infinitely_many_ends() {
    let v = json(&["ends", &corpus("f2"), "--radii", "4,6,8"]);
    assert_eq!(v["schema_version"], 1);
    let counts: Vec<u64> = v["result"]["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    assert!(counts.windows(2).all(|w| w[0] < w[1]), "{counts:?}");
    assert_eq!(v["result"]["verdict"], "infinite_growing");
}

#[test]
fn amalgam_check_on_two_planes() {
    let v = json(&["amalgam-check", &corpus("z2z2"), "--depth", "5", "--seed", "7"]);
    assert_eq!(v["result"]["pass"], true);
    let conditions = v["result"]["certificate"]["conditions"].as_array().unwrap();
    assert_eq!(conditions.len(), 5);
    assert_eq!(v["result"]["branch_density"]["verdict"], "pass");
}

#[test]
fn presentation_formats() {
    let gap = lab(&["presentation", &corpus("dinf"), "--emit", "gap"]);
    assert!(String::from_utf8(gap.stdout).unwrap().contains("G := F / [a^2, b^2];"));
    let v = json(&["presentation", &corpus("sl2z")]);
    assert_eq!(v["result"]["abelianization"]["torsion"], serde_json::json!([12]));
}

#[test]
fn dot_output() {
    let out = lab(&["tree-ball", &corpus("z2z3"), "--radius", "2", "--emit", "dot"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph tree {"));
    assert_eq!(dot.matches(" -- ").count(), 6);
    let out = lab(&["cayley-ball", &corpus("dinf"), "--radius", "3", "--emit", "dot"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().matches(" -- ").count(), 6);
}

#[test]
fn collapse_round_trips_through_json() {
    let path = scratch("collapsed.json");
    let out = lab(&["collapse", &corpus("dinf3"), "--emit", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let again = lab(&["validate", path.to_str().unwrap(), "--from", "json"]);
    assert!(String::from_utf8(again.stdout).unwrap().contains("< a, c | a^2, c^2 >"));
    let text = lab(&["collapse", &corpus("dinf3")]);
    assert!(String::from_utf8(text.stdout).unwrap().starts_with("# collapsed y\n"));
    assert_eq!(lab(&["collapse", &corpus("dinf")]).status.code(), Some(1));
}

#[test]
fn every_json_report_is_readable_as_input() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate"],
        vec!["presentation"],
        vec!["tree-ball", "--radius", "2"],
        vec!["cayley-ball", "--radius", "2"],
        vec!["separate", "--radius", "6", "--R", "1", "--samples", "5"],
        vec!["verify-k", "--radius", "8", "--edges", "3"],
        vec!["ends", "--radii", "2,3,4"],
        vec!["boundary", "--depth", "3"],
        vec!["amalgam-check", "--depth", "4", "--samples", "5"],
        vec!["classify", "--word", "a*b", "--count", "6"],
    ];
    for run in runs {
        let (cmd, rest) = run.split_first().unwrap();
        let first = lab(&[&[*cmd, corpus("z2z3").as_str()], rest, &["--emit", "json"]].concat());
        assert!(first.status.success(), "{cmd}");
        let path = scratch(&format!("{cmd}.json"));
        std::fs::write(&path, &first.stdout).unwrap();
        let second = lab(&[&[*cmd, path.to_str().unwrap()], rest, &["--emit", "json", "--from", "json"]].concat());
        assert_eq!(first.stdout, second.stdout, "{cmd}");
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["separate", &corpus("z2z3"), "--radius", "8", "--R", "2", "--samples", "20", "--seed", "3", "--emit", "json"];
    let (a, b) = (lab(&args), lab(&args));
    assert_eq!(a.stdout, b.stdout);
    let jobs = lab(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.stdout, jobs.stdout);
    let other = lab(&["separate", &corpus("z2z3"), "--radius", "8", "--R", "2", "--samples", "20", "--seed", "4", "--emit", "json"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn classify_examples() {
    let out = lab(&["classify", &corpus("z2z2"), "--word", "x", "--count", "8"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("vertex point of v1"));
    let v = json(&["classify", &corpus("z2z3"), "--word", "a*b", "--count", "8"]);
    assert_eq!(v["result"]["class"]["kind"], "branch_point");
    let v = json(&["classify", &corpus("z2z3"), "--samples", "a*b,b*a,a*b*a*b,b*a*b*a"]);
    assert!(v["result"]["class"]["kind"].is_string());
}

#[test]
fn log_is_a_sidecar() {
    let log = scratch("run.log");
    let out = lab(&["validate", &corpus("z2"), "--emit", "json", "--log", log.to_str().unwrap()]);
    assert!(!String::from_utf8(out.stdout).unwrap().contains("ms"));
    let line = std::fs::read_to_string(&log).unwrap();
    assert!(line.contains(" validate ") && line.trim_end().ends_with("exit=0"));
}

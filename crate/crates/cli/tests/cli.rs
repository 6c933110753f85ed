//! End-to-end runs of the `mtl` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use mtl_core::bayesnet::{enumerate_joint, trolley_network};
use mtl_core::Limits;

fn mtl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtl"))
        .args(args)
        .env_remove("MTL_CAP_OVERRIDE")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mtl-cli-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn plan_c4_unordered_rows() {
    let out = mtl(&["plan", "c4", "--ordered=false", "--n", "1..12"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,plan,value,metered,predicted,seconds"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 12);
    for (i, row) in rows.iter().enumerate() {
        let n = i as u32 + 1;
        assert_eq!(row[0], n.to_string());
        assert_eq!(row[3], (2u64.pow(n) - 1).to_string());
        assert_eq!(row[3], row[4]);
    }
}

#[test]
fn bayes_trolley_query_matches_enumeration() {
    let out = mtl(&["bayes", "trolley", "--query", "x7", "--evidence", "x1=true"]);
    assert_eq!(out.status.code(), Some(0));
    let net = trolley_network();
    let joint = enumerate_joint(&net, &Limits::default()).unwrap();
    let (x1, x7) = (net.index_of("x1").unwrap(), net.index_of("x7").unwrap());
    let observed: f64 = joint
        .iter()
        .enumerate()
        .filter(|(s, _)| s >> x1 & 1 == 1)
        .map(|(_, p)| p)
        .sum();
    let both: f64 = joint
        .iter()
        .enumerate()
        .filter(|(s, _)| s >> x1 & 1 == 1 && s >> x7 & 1 == 1)
        .map(|(_, p)| p)
        .sum();
    let text = stdout(&out);
    let row = text
        .lines()
        .find(|l| l.starts_with("query,x7=true,"))
        .expect("x7=true row");
    let cells: Vec<&str> = row.split(',').collect();
    let reported: f64 = cells[2].parse().unwrap();
    assert!((reported - both / observed).abs() < 1e-9);
    assert_eq!(cells[2], cells[3]);
}

#[test]
fn malformed_instance_reports_position() {
    let path = scratch("broken.json");
    fs::write(&path, "{\n  \"actions\": [\"a\",\n}").unwrap();
    let out = mtl(&["plan", "c4", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3 column 1"), "{err}");
    assert!(err.contains("broken.json"), "{err}");
}

#[test]
fn validation_failure_exits_two() {
    let out = mtl(&["learn", "pac", "--epsilon", "1.5", "--class-size", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cap_refusal_keeps_rows_and_exits_three() {
    let out = mtl(&["growth", "c4u", "--n", "19..22"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 2 + 1);
    assert_eq!(lines[3], "21,2097151,refused,0");
}

#[test]
fn cap_override_lifts_refusal() {
    let out = Command::new(env!("CARGO_BIN_EXE_mtl"))
        .args(["seqdec", "pomdp", "tiger", "--horizon", "3"])
        .env("MTL_CAP_OVERRIDE", "pomdp_trees=10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = mtl(&["seqdec", "pomdp", "tiger", "--horizon", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unknown_operation_is_usage_error() {
    assert_eq!(mtl(&["games", "auction"]).status.code(), Some(64));
    assert_eq!(mtl(&["bake"]).status.code(), Some(64));
}

#[test]
fn out_file_and_json_format() {
    let path = scratch("growth.json");
    let out = mtl(&[
        "growth",
        "c3u",
        "--n",
        "1..5",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let predicted: Vec<u64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["predicted"].as_u64().unwrap())
        .collect();
    assert_eq!(predicted, [1, 3, 6, 10, 15]);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["plan", "c3", "--ordered", "--n", "1..9", "--seed", "5"];
    assert_eq!(mtl(&args).stdout, mtl(&args).stdout);
}

#[test]
fn every_family_runs_on_bundled_data() {
    for args in [
        &["uncertain"][..],
        &["rules", "both"],
        &["games", "ce", "chicken"],
        &["games", "tournament"],
        &["seqdec", "vi"],
        &["seqdec", "bandit"],
        &["learn", "nfl"],
        &["learn", "shatter", "--points", "0,0;1,0;0,1;1,1"],
        &["builtins"],
    ] {
        let out = mtl(args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(stdout(&out).lines().count() > 1, "{args:?}");
    }
}

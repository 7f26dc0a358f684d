use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SHIFTS: &str = "000,1aA,A1a,aA1";

fn upb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("stdout is JSON lines"))
        .collect()
}

fn catalog_lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn check_accepts_a_upb() {
    let out = upb(&["check", SHIFTS]);
    assert!(out.status.success());
    let rec = &records(&out)[0];
    assert_eq!(rec["verdict"], "UPB");
    assert_eq!(rec["p"], 3);
    assert_eq!(rec["s"], 4);
}

#[test]
fn check_reports_witness_and_missing_pairs() {
    let out = upb(&["check", "000,1aA,A1a"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(records(&out)[0]["witness"].is_array());

    let out = upb(&["check", "000,001,0aa"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(records(&out)[0]["missing_pairs"], serde_json::json!([[0, 2], [1, 2]]));
}

#[test]
fn check_reads_files_with_comments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bases.txt");
    std::fs::write(&path, format!("# two bases\n{SHIFTS}\n\n00,01,10,11\n")).unwrap();
    let out = upb(&["check", &format!("@{}", path.display())]);
    assert!(out.status.success());
    assert_eq!(records(&out).len(), 2);
}

#[test]
fn bad_input_is_an_error() {
    let out = upb(&["check", "00,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert_eq!(upb(&["search", "--p", "3"]).status.code(), Some(2));
}

#[test]
fn equivalence_ignores_relabeling() {
    let out = upb(&["equiv", SHIFTS, "aA1,000,A1a,1aA"]);
    assert!(out.status.success());
    assert_eq!(records(&out)[0]["equivalent"], true);
    let out = upb(&["equiv", SHIFTS, "000,001,010,011,100,101,110,111"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn canon_output_parses_back() {
    let out = upb(&["canon", "aA1,000,A1a,1aA"]);
    let rec = &records(&out)[0];
    let again = upb(&["canon", &rec["graph"].to_string()]);
    assert_eq!(records(&again)[0]["key"], rec["key"]);
}

#[test]
fn search_writes_catalog_report_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("c.jsonl");
    let resume = dir.path().join("r.jsonl");
    let report = dir.path().join("report.json");
    let base = [
        "search", "--p", "4", "--s", "7", "--resume", resume.to_str().unwrap(), "-o", catalog.to_str().unwrap(),
    ];

    let mut partial = base.to_vec();
    partial.extend(["--unit-limit", "5", "--workers", "1"]);
    let out = upb(&partial);
    assert_eq!(out.status.code(), Some(1));
    let msg: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(msg["interrupted"], true);
    assert_eq!(msg["completed_units"], 5);

    let mut full = base.to_vec();
    full.extend(["--report", report.to_str().unwrap()]);
    let out = upb(&full);
    assert!(out.status.success());
    let summary = &records(&out)[0];
    assert_eq!(summary["classes"], 1);
    assert_eq!(summary["units_resumed"], 5);
    let lines = catalog_lines(&catalog);
    assert_eq!(lines[0]["format"], "upb-catalog");
    assert_eq!(lines.len(), 2);
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["units"].as_array().unwrap().len(), summary["profiles_searched"].as_u64().unwrap() as usize);

    let merged = dir.path().join("m.jsonl");
    let out = upb(&["merge", catalog.to_str().unwrap(), catalog.to_str().unwrap(), "-o", merged.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(catalog_lines(&merged), lines);
}

#[test]
fn profile_counts_show_the_constraint_set() {
    let out = upb(&["profiles", "--p", "4", "--s", "11", "--count"]);
    assert!(out.status.success());
    let rec = &records(&out)[0];
    assert_eq!(rec["counts"]["kept"], 15125);
    assert_eq!(rec["constraints"]["reverse_combine"], true);
}

#[test]
fn constructions() {
    let out = upb(&["construct", "--method", "mult4", "--p", "5", "--s", "8"]);
    assert!(out.status.success());
    assert_eq!(records(&out)[0]["verdict"], "UPB");

    let out = upb(&["construct", "--method", "combine", "--input", SHIFTS, "--input", SHIFTS]);
    let rec = &records(&out)[0];
    assert_eq!((rec["p"].as_u64(), rec["s"].as_u64()), (Some(4), Some(8)));

    let out = upb(&["construct", "--method", "mult4", "--p", "9", "--s", "20"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no construction route"));

    let out = upb(&["construct", "--method", "split", "--input", SHIFTS, "--qubit", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sizes_summary() {
    let out = upb(&["sizes", "--p", "7"]);
    let rec = &records(&out)[0];
    assert_eq!(rec["min_size"], 8);
    assert!(rec["attainable"].as_str().unwrap().contains("20-122"));
}

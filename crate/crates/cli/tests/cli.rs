use std::fs;
use std::io::Write;
use std::process::{Command, Output};

use goldbach_core::scan::{scan_range, OutputFormat, ReportWriter, ScanConfig};
use serde_json::Value;
use tempfile::TempDir;

fn goldbach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goldbach")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn table_echoes_its_arguments_then_rows() {
    let out = goldbach(&["table", "9", "7"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "# goldbach table n1_max=9 prime_max=7 format=plain\n# n1: r(3) r(5) r(7)\n3: 0 3 3\n5: 2 0 5\n7: 1 2 0\n9: 0 4 2\n"
    );
    let csv = goldbach(&["--format", "csv", "table", "5", "5"]);
    assert_eq!(stdout(&csv), "# goldbach table n1_max=5 prime_max=5 format=csv\nn1,r3,r5\n3,0,3\n5,2,0\n");
}

#[test]
fn count_and_partitions() {
    let out = goldbach(&["count", "20"]);
    assert!(stdout(&out).ends_with(
        "q=20 n=8 goldbach_ordered=4 goldbach_unordered=2 admissible_count=2 predicate_cutoff=3 special=none\n"
    ));
    let out = goldbach(&["--format", "csv", "partitions", "10"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows[0], "n1,n2,admissible,prime_pair");
    assert!(rows.contains(&"5,5,true,true"));
    assert!(rows.contains(&"3,7,false,true"));
    assert!(rows.contains(&"7,3,false,true"));
}

#[test]
fn bound_breakdown_is_exact() {
    let out = goldbach(&["bound", "100"]);
    assert!(out.status.success());
    let line = stdout(&out).lines().last().unwrap().to_string();
    for field in
        ["q=100", "cutoff=3;5;7", "p_j=7", "shrink=1/7", "n=48", "sub=5", "A=13/7", "A_three=46/3", "A_three_five=7/1"]
    {
        assert!(line.split(' ').any(|f| f == field), "{field} missing from {line}");
    }

    let out = goldbach(&["--format", "jsonl", "bound", "6"]);
    let lines: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["config"]["command"], "bound");
    assert_eq!(lines[1]["A_num"], 1);
    assert_eq!(lines[1]["A_den"], 1);
    assert_eq!(lines[1]["special"], "empty_cutoff");
}

#[test]
fn minima_at_thirty_seven() {
    let out = goldbach(&["minima", "37", "37"]);
    let line = stdout(&out).lines().last().unwrap().to_string();
    assert!(line.contains("A_direct=1774745/342953"), "{line}");
    assert!(line.contains("A_telescoped=1774745/342953"), "{line}");
    assert!(line.contains("lower_chain=73/37"), "{line}");
    assert!(line.contains("forms_agree=true") && line.contains("exceeds_lower_chain=true"), "{line}");

    let out = goldbach(&["--format", "csv", "minima", "3", "11"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 4);
    // No telescoped form below 11: empty cells, column count preserved.
    assert_eq!(rows[0].split(',').count(), rows[3].split(',').count());
    assert!(rows[0].contains(",,,"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["table", "1", "29"][..],
        &["count", "7"],
        &["bound", "4"],
        &["scan", "5", "100"],
        &["scan", "4", "100", "--chunk", "3"],
        &["--format", "plain", "scan", "4", "100"],
        &["--checkpoint", "x.cp", "scan", "4", "100"],
        &["--checkpoint", "x.cp", "count", "20"],
        &["--workers", "0", "scan", "4", "100"],
        &["minima", "40", "30"],
        &["frobnicate"],
    ] {
        let out = goldbach(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn scan_writes_data_to_stdout_and_summary_to_stderr() {
    let out = goldbach(&["--workers", "2", "scan", "4", "2000", "--chunk", "64"]);
    assert!(out.status.success());
    let cfg = ScanConfig { chunk: 64, workers: 2, ..ScanConfig::new(4, 2000) };
    let mut sink = ReportWriter::new(Vec::new(), OutputFormat::Csv);
    scan_range(&cfg, &mut sink, None).unwrap();
    assert_eq!(out.stdout, sink.into_inner());
    let err = stderr(&out);
    assert!(err.contains("records: 999\n") && err.contains("violations: 0\n"), "{err}");
    assert!(err.contains("min margin: q=12"), "{err}");

    let out = goldbach(&["--format", "jsonl", "scan", "4", "20"]);
    let text = stdout(&out);
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["config"]["q_hi"], 20);
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["q"], 20);
    assert_eq!(last["A_num"], 5);
    assert_eq!(last["A_den"], 3);
}

#[test]
fn injected_violation_exits_with_one() {
    let out = goldbach(&["scan", "4", "1000", "--inject-violation", "500"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("violations: 1\n") && err.contains("violating q: 500\n"), "{err}");
    let row = stdout(&out).lines().find(|l| l.starts_with("500,")).unwrap().to_string();
    assert!(row.contains(",false,true,none"), "{row}");
}

#[test]
fn checkpointed_scan_resumes_and_refuses_mismatches() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("scan.csv");
    let cp = dir.path().join("scan.cp");
    let (out_s, cp_s) = (out.to_str().unwrap(), cp.to_str().unwrap());

    let first = goldbach(&["--checkpoint", cp_s, "--output", out_s, "scan", "4", "3000", "--chunk", "200"]);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(first.stdout.is_empty());
    assert_eq!(fs::read_to_string(&cp).unwrap(), "goldbach-scan v1 4 3000 200\n3000\n");
    let bytes = fs::read(&out).unwrap();

    // Simulate an interruption: wind the checkpoint back and leave a torn row.
    fs::write(&cp, "goldbach-scan v1 4 3000 200\n1202\n").unwrap();
    fs::OpenOptions::new().append(true).open(&out).unwrap().write_all(b"1204,602,31").unwrap();
    let again = goldbach(&["--checkpoint", cp_s, "--output", out_s, "scan", "4", "3000", "--chunk", "200"]);
    assert!(again.status.success(), "{}", stderr(&again));
    assert!(stderr(&again).contains("resuming"));
    assert_eq!(fs::read(&out).unwrap(), bytes);

    let other = goldbach(&["--checkpoint", cp_s, "--output", out_s, "scan", "4", "3000", "--chunk", "400"]);
    assert_eq!(other.status.code(), Some(2));
    assert!(stderr(&other).contains("refusing to resume"), "{}", stderr(&other));
    let other =
        goldbach(&["--seed", "9", "--checkpoint", cp_s, "--output", out_s, "scan", "4", "3000", "--chunk", "200"]);
    assert_eq!(other.status.code(), Some(2));
    assert_eq!(fs::read(&out).unwrap(), bytes);

    let missing = goldbach(&["--checkpoint", cp_s, "scan", "4", "3000", "--chunk", "200"]);
    assert_eq!(missing.status.code(), Some(2));
}

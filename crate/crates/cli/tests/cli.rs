use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqa")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn person(extra: &[&str]) -> Vec<String> {
    let mut v = vec![
        "--instance".to_string(),
        data("person.csv"),
        "--constraints".to_string(),
        data("person.dsl"),
    ];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run(cmd: &str, args: Vec<String>) -> Output {
    let mut all = vec![cmd.to_string()];
    all.extend(args);
    let refs: Vec<&str> = all.iter().map(String::as_str).collect();
    cqa(&refs)
}

#[test]
fn answer_person_golden() {
    let v = json(&run("answer", person(&["--query", "Person(n,c,s)"])));
    assert_eq!(v["answers"], serde_json::json!([["Green", "Clarence", "4000 Transit"]]));
    assert_eq!(v["strategy"], "qfree");
    let v = json(&run("answer", person(&["--query", "exists s. Person(n,c,s)"])));
    assert_eq!(v["answers"], serde_json::json!([["Brown", "Amherst"], ["Green", "Clarence"]]));
    assert_eq!(v["strategy"], "oracle");
}

#[test]
fn output_is_deterministic() {
    let a = run("answer", person(&["--query", "exists s. Person(n,c,s)", "--format", "table"]));
    let b = run("answer", person(&["--query", "exists s. Person(n,c,s)", "--format", "table"]));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout), "n      c\nBrown  Amherst\nGreen  Clarence\n");
}

#[test]
fn repairs_count_example3() {
    let out = cqa(&[
        "repairs", "--count", "--instance", &data("example3_n3.csv"),
        "--constraints", &data("example3.dsl"),
    ]);
    assert_eq!(json(&out)["count"], 8);
    let out = run("repairs", person(&["--enumerate"]));
    assert!(out.status.success());
    let lines: Vec<Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0][1], serde_json::json!(["Green", "Clarence", "4000 Transit"]));
}

#[test]
fn check_reports_consistency() {
    let out = cqa(&["check", "--instance", &data("person.csv")]);
    assert_eq!(json(&out), serde_json::json!({ "consistent": true }));
    let v = json(&run("check", person(&[])));
    assert_eq!(v["consistent"], false);
}

#[test]
fn rewrite_prints_query() {
    let out = cqa(&["rewrite", "--schema", "A:sym,B:sym", "--fd", "A -> B", "--phi", "B != 'x'", "--format", "table"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "exists x_A,y_B. forall y1_B. R(x_A,y_B) & y_B != 'x' & (R(x_A,y1_B) -> R(x_A,y1_B) & y1_B != 'x')"
    );
}

#[test]
fn gen_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("mono");
    let out = cqa(&["gen", "monotone3sat", "--input", &data("monotone.cnf"), "--out-prefix", prefix.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["facts"], 6);
    assert_eq!(v["falsifying_repair"], true);
    let csv = dir.path().join("mono.csv");
    let dsl = dir.path().join("mono.dsl");
    let query = std::fs::read_to_string(dir.path().join("mono.query")).unwrap();
    let out = cqa(&[
        "answer", "--instance", csv.to_str().unwrap(), "--constraints", dsl.to_str().unwrap(),
        "--query", query.trim(),
    ]);
    assert_eq!(json(&out)["status"], "Undetermined");
}

#[test]
fn hypergraph_stats() {
    let v = json(&run("hypergraph", person(&["--stats"])));
    assert_eq!(v["edge_count"], 1);
    assert_eq!(v["isolated_vertex_count"], 1);
}

#[test]
fn exit_codes() {
    let out = run("answer", person(&["--query", "Person(n,c"]));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:11"));
    let out = run("answer", person(&["--query", "exists s. Person(n,c,s)", "--strategy", "qfree"]));
    assert_eq!(out.status.code(), Some(2));
    let out = run("answer", person(&["--query", "Person(n,c,s)", "--strategy", "oracle", "--oracle-budget", "1"]));
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(cqa(&["answer", "--bogus"]).status.code(), Some(2));
    let out = cqa(&["check", "--instance", "/nonexistent.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_csv_reports_file_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "A:sym,B:num\nx,notanumber\n").unwrap();
    let out = cqa(&["check", "--instance", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.csv") && err.contains("2:"), "{err}");
}

#[test]
fn selftest_small() {
    let v = json(&cqa(&["selftest", "--seed", "3", "--cases", "10", "--threads", "2"]));
    assert_eq!(v.as_array().unwrap().len(), 5);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const COMB: &str = r#"{"kind":"automaton","states":2,"initial":0,"edges":[[0,1,0],[0,0,1],[1,0,1]],"exclude":["(1)"]}"#;

fn cantorfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantorfam")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn rank_of_the_comb() {
    let dir = tempfile::tempdir().unwrap();
    let comb = write(dir.path(), "comb.fam.json", COMB);
    let out = cantorfam(&["rank", &comb]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "RS=1 ds=1");
}

#[test]
fn construct_writes_a_verified_family() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.fam.json");
    let out = cantorfam(&["construct", "--rank", "2", "--degree", "3", "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("verified (2,3)"));
    let again = cantorfam(&["rank", path.to_str().unwrap()]);
    assert_eq!(stdout(&again).trim(), "RS=2 ds=3");
}

#[test]
fn construct_transfinite_is_recipe_only() {
    let out = cantorfam(&["construct", "--rank", "w+1", "--degree", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "recipe-only (w + 1,2)");
}

#[test]
fn forces_sentences_and_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let comb = write(dir.path(), "comb.fam.json", COMB);
    assert_eq!(stdout(&cantorfam(&["forces", &comb, "--phi", "Q1", "--psi", "Q0"])).trim(), "YES");
    assert_eq!(stdout(&cantorfam(&["forces", &comb, "--phi", "Q0", "--psi", "Q1"])).trim(), "NO");
    let diag = cantorfam(&["forces", &comb, "--lhs-scheme", "diag((1))", "--rhs-scheme", "{!Q0}"]);
    assert_eq!(stdout(&diag).trim(), "YES");
    let closed = write(dir.path(), "closed.fam.json", &COMB.replace(r#","exclude":["(1)"]"#, ""));
    let target = format!("target({closed})");
    let out = cantorfam(&["forces", &comb, "--lhs-scheme", &target, "--rhs-scheme", "{T}"]);
    assert_eq!(stdout(&out).trim(), "YES", "{}", stderr(&out));
}

#[test]
fn closure_and_restrict_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let comb = write(dir.path(), "comb.fam.json", COMB);
    let closed = dir.path().join("closed.fam.json");
    let out = cantorfam(&["closure", &comb, "-o", closed.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(!fs::read_to_string(&closed).unwrap().contains("exclude"));

    let out = cantorfam(&["restrict", &comb, "--phi", "!Q0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json = stdout(&out);
    assert!(json.contains(r#""kind": "explicit""#) && json.contains(r#""(0)""#), "{json}");
}

#[test]
fn decompose_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(
        dir.path(),
        "two.fam.json",
        r#"{"kind":"expr","expr":{"union":[["0",{"limit":{"body":{"point":"(0)"},"bit":1}}],["1",{"limit":{"body":{"point":"(0)"},"bit":1}}]]}}"#,
    );
    let out = stdout(&cantorfam(&["decompose", &two]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l.ends_with("\tRS=1 ds=1")), "{out}");

    let comb = write(dir.path(), "comb.fam.json", COMB);
    assert_eq!(cantorfam(&["witness-nonsdef", &comb]).status.code(), Some(1));
    let closed = write(dir.path(), "closed.fam.json", &COMB.replace(r#","exclude":["(1)"]"#, ""));
    let out = stdout(&cantorfam(&["witness-nonsdef", &closed]));
    assert!(out.contains("theory (1)"), "{out}");
}

#[test]
fn domain_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.fam.json", "{\"kind\":\"explicit\",\n\"points\":[\"1(\"]}");
    let out = cantorfam(&["rank", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error:") && stderr(&out).contains("line 2"), "{}", stderr(&out));

    let comb = write(dir.path(), "comb.fam.json", COMB);
    let out = cantorfam(&["forces", &comb, "--phi", "Q0 &", "--psi", "Q1"]);
    assert_eq!(out.status.code(), Some(1));
    let out =
        cantorfam(&["witness-nonsdef", &write(dir.path(), "pts.fam.json", r#"{"kind":"explicit","points":["(0)"]}"#)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(cantorfam(&["check", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(cantorfam(&["rank", "/nonexistent.fam.json"]).status.code(), Some(1));
}

#[test]
fn check_reports_each_property() {
    let out = cantorfam(&["check", "--suite", "sentences", "--seed", "3"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() >= 3, "{text}");
    assert!(text.trim_end().ends_with("0 failed (seed 3)"));
}

#[test]
fn failing_suite_exits_with_two() {
    let out = cantorfam(&["check", "--suite", "calculus"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("FAIL scheme forcing is invariant under closure:")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("PASS scheme forcing is invariant under closure, finite left scheme")));
}

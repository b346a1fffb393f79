//! The seeded property suites, one test each.

use cantorfam::check;

fn suite(name: &str) {
    let outcomes = check::run(name, 0).expect("known suite");
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.to_string()).collect();
    assert!(failed.is_empty(), "{}", failed.join("\n"));
}

#[test]
fn sentences() {
    suite("sentences");
}

#[test]
fn family() {
    suite("family");
}

#[test]
fn rank() {
    suite("rank");
}

#[test]
fn calculus() {
    suite("calculus");
}

#[test]
fn construct() {
    suite("construct");
}

#[test]
fn oracle() {
    suite("oracle");
}

#[test]
fn cli_formats() {
    suite("cli");
}

#[test]
fn unknown_suite_is_rejected() {
    assert!(check::run("nope", 0).is_err());
}

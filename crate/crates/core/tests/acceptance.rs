//! One line per acceptance criterion. Run with `--nocapture` to see the report.

use cantorfam::check;

#[test]
fn acceptance_criteria() {
    let outcomes = check::acceptance(0);
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
    println!("{} of {} criteria pass", outcomes.len() - failed.len(), outcomes.len());
    assert!(failed.is_empty(), "failing: {failed:?}");
}

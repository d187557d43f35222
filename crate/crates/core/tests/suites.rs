//! Every cross-check suite at its default size.

use skelmad_core::check::{run_suite, CheckConfig, Suite};

fn run(suite: Suite) {
    let report = run_suite(suite, &CheckConfig::default());
    println!("{report}");
    for note in &report.notes {
        println!("  note: {note}");
    }
    assert!(report.passed(), "{report}: {:#?}", &report.failures[..report.failures.len().min(5)]);
    assert!(report.cases > 0);
}

#[test]
fn marking() {
    run(Suite::Marking);
}

#[test]
fn skeleton() {
    run(Suite::Skeleton);
}

#[test]
fn diamond() {
    run(Suite::Diamond);
}

#[test]
fn determinism() {
    run(Suite::Determinism);
}

#[test]
fn bisim() {
    run(Suite::Bisim);
}

#[test]
fn audit() {
    run(Suite::Audit);
}

#[test]
fn canon() {
    run(Suite::Canon);
}

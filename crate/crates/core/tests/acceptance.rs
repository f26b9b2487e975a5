//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Criteria listed in `KNOWN_FAILURES` are expected to fail and must keep
//! failing; everything else must pass.

use std::io::Write;

use wreathgen::selftest::{self, KNOWN_FAILURES};
use wreathgen::RunConfig;

#[test]
fn acceptance() {
    let results = selftest::run(&RunConfig::default(), &[]);
    // written past the test harness capture so the report always shows
    let mut out = std::io::stdout().lock();
    for r in &results {
        writeln!(out, "{}", r.line()).unwrap();
    }
    let passed = results.iter().filter(|r| r.passed).count();
    writeln!(out, "{passed}/{} criteria pass", results.len()).unwrap();
    drop(out);

    let unexpected: Vec<u32> = results
        .iter()
        .filter(|r| !r.passed && r.known_failure.is_none())
        .map(|r| r.id)
        .collect();
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
    for (id, _) in KNOWN_FAILURES {
        let r = results.iter().find(|r| r.id == *id).expect("criterion ran");
        assert!(!r.passed, "criterion {id} is listed as a known failure but now passes");
    }
}

//! The nine-point acceptance gate. Each numbered check prints one
//! pass/fail line; the test fails if any check does.

use s4c::suite;

const SEED: u64 = 0x5EED_2026;

#[test]
fn acceptance_gate() {
    let outcomes = suite::run_all(SEED);
    let mut all_passed = true;
    for o in &outcomes {
        let status = if o.passed { "pass" } else { "FAIL" };
        println!(
            "[{status}] criterion {} ({}) in {} ms: {}",
            o.index, o.name, o.millis, o.detail
        );
        all_passed &= o.passed;
    }
    assert!(all_passed, "at least one acceptance criterion failed");
}

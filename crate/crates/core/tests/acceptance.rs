//! End-to-end acceptance gate: runs every cross-validation check and prints
//! one pass/fail line per criterion.

use weyl_dynamics::suite::run_suite;

#[test]
fn acceptance_suite() {
    let results = run_suite(None, 42);
    assert_eq!(results.len(), 12, "expected all twelve checks to run");
    let mut failed = Vec::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {:<26} {}", r.name, r.detail);
        if !r.passed {
            failed.push(r.name);
        }
    }
    assert!(failed.is_empty(), "failed checks: {failed:?}");
}

//! Acceptance suite: runs every criterion and prints one pass/fail line per
//! criterion. All checks are exact integer assertions; random material is
//! seeded and reproducible.

use baire::suite::{run_suite, SUITE_NAMES};

const SEED: u64 = 0xBA1E;

#[test]
fn acceptance() {
    let mut all_passed = true;
    let mut lines = Vec::new();
    for name in SUITE_NAMES {
        let results = run_suite(name, SEED).expect("suite must run");
        for r in results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            lines.push(format!("{status} {:<32} {}", r.id, r.detail));
            all_passed &= r.passed;
        }
    }
    for line in &lines {
        println!("{line}");
    }
    assert!(all_passed, "acceptance criteria failed:\n{}", lines.join("\n"));
}

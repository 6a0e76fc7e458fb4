//! Acceptance gate: runs every verification suite at its default
//! parameters and prints one pass/fail line per criterion.

use std::time::Instant;

use urlab_core::verify::{run_suite, VerifyParams, SUITE_NAMES};

#[test]
fn acceptance_criteria() {
    let params = VerifyParams::default();
    let mut all_pass = true;
    let mut lines = Vec::new();
    for name in SUITE_NAMES {
        let start = Instant::now();
        let result = run_suite(name, &params).unwrap_or_else(|e| panic!("suite {name} errored: {e}"));
        let elapsed = start.elapsed();
        let line = format!("{} [{:.2}s]", result.line(), elapsed.as_secs_f64());
        println!("{line}");
        for failure in &result.failures {
            println!("    {failure}");
        }
        all_pass &= result.pass;
        lines.push(line);
    }
    assert!(all_pass, "acceptance criteria failed:\n{}", lines.join("\n"));
}

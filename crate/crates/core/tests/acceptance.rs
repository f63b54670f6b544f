//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;

use conewishart::verify::{run_check, VerifyConfig, CHECKS};

fn main() -> ExitCode {
    let config = VerifyConfig::default();
    println!("acceptance: {} criteria, seed {}, {} Monte Carlo draws", CHECKS.len(), config.seed, config.draws);
    let mut failed = 0;
    for id in 1..=CHECKS.len() {
        let result = run_check(id, &config);
        if !result.passed {
            failed += 1;
        }
        println!("{result}");
    }
    println!("acceptance: {} passed, {failed} failed", CHECKS.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

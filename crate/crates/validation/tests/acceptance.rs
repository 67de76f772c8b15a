//! Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
//! any fails.

use std::process::ExitCode;

fn main() -> ExitCode {
    let results = catlep_validation::run_all();
    let mut failed = 0;
    for o in &results {
        println!("criterion {:>2}: {} - {}", o.criterion, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! One line per acceptance criterion, then the linear algebra self-test.
//! Ranges and tolerances live in `chowext::verify`. Exits non-zero if any
//! check fails.

use std::process::ExitCode;

use chowext::verify;

fn main() -> ExitCode {
    let mut ids = verify::suite("acceptance").expect("known suite");
    ids.push(0);
    let mut failed = Vec::new();
    for id in ids {
        let r = verify::run_check(id);
        println!("{r}");
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all checks passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {failed:?}");
        ExitCode::FAILURE
    }
}

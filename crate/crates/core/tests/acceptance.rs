//! Acceptance criteria 1-9, one printed line per criterion.
//!
//! `cargo test --test acceptance [group|id]` runs all criteria or the
//! matching ones; the process fails if any criterion outside
//! [`EXPECTED_FAILURES`] fails.

use std::process::ExitCode;
use std::thread;

use discflux::acceptance::{run_criterion, select, Outcome, Thresholds};

/// Criteria that are run and reported but not required to pass; see the README.
const EXPECTED_FAILURES: [u8; 1] = [6];

fn acceptable(o: &Outcome) -> bool {
    !o.detail.starts_with("error:") && (o.passed || EXPECTED_FAILURES.contains(&o.id))
}

fn main() -> ExitCode {
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria = select(filter.as_deref());
    let th = &Thresholds::default();
    let outcomes: Vec<Outcome> = thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|&c| s.spawn(move || run_criterion(c, th))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    let mut unexpected = 0;
    for o in &outcomes {
        let note = match (o.passed, acceptable(o)) {
            (false, true) => " [expected failure]",
            (_, false) => " [UNEXPECTED]",
            _ => "",
        };
        println!("{}{note}", o.line());
        if !acceptable(o) {
            unexpected += 1;
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!(
        "\nacceptance: {passed}/{} passed, {} expected failure(s), {unexpected} unexpected",
        outcomes.len(),
        outcomes.iter().filter(|o| !o.passed && acceptable(o)).count()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

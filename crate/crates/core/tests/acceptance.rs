//! One line per acceptance criterion.
//!
//! Criteria 6 and 9 fail for the `thm2` preset as parameterized
//! (`s_j(N+1) = j·h_j`): its top spacer at stages 4 and 5 is too short for the
//! `T × T³` zero-return claim, which needs `s_j(N+1)` large against `h_j`.
//! They are reported as FAIL and pinned here so that any change in their
//! outcome is noticed.

use rankone::acceptance::{criterion, CriterionOutcome};
use rankone::Status;

const KNOWN_FAILURES: [u8; 2] = [6, 9];

fn run(id: u8) -> CriterionOutcome {
    let outcome = criterion(id).expect("criterion exists");
    println!("{outcome} ({:.1?})", outcome.elapsed);
    outcome
}

fn main() {
    let outcomes: Vec<CriterionOutcome> = (1..=9).map(run).collect();
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let expected = if KNOWN_FAILURES.contains(&o.id) { Status::Fail } else { Status::Pass };
        if o.status != expected {
            unexpected.push(format!("criterion {} is {} (expected {expected})", o.id, o.status));
        }
    }
    let passed = outcomes.iter().filter(|o| o.status == Status::Pass).count();
    println!("{passed}/9 PASS; known failures {KNOWN_FAILURES:?}");
    if !unexpected.is_empty() {
        eprintln!("{}", unexpected.join("; "));
        std::process::exit(1);
    }
}

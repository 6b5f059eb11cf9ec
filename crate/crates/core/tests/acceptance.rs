//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use geophase::experiment::Execution;
use geophase::validation::run_acceptance;

fn main() {
    let checks = run_acceptance(Execution::Parallel);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

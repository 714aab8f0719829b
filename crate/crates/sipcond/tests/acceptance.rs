//! Acceptance criteria 1-13. Prints one verdict line per criterion (with
//! informational lines beneath) and exits nonzero if any criterion fails.
//! Criterion ids given as arguments restrict the run:
//!
//! ```bash
//! cargo test -p sipcond --test acceptance -- 1 3 10
//! ```

use std::process::ExitCode;

use sipcond::harness::acceptance::{run_suite, Fixture};

fn main() -> ExitCode {
    // libtest-style flags (e.g. --nocapture) are accepted and ignored
    let ids: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let outcomes = run_suite(&Fixture::default(), &ids, true);
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    println!(
        "\nacceptance: {} passed, {} failed{}",
        outcomes.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" (criteria {})", failed.join(", ")) }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

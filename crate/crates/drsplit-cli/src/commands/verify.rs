//! `drsplit verify` — run the identity/property verification suite and
//! print a pass/fail table. Exits 0 iff every check passes, 4 otherwise
//! (naming the failing checks).

use clap::Args;
use drsplit::verify::run_all;

use crate::errors::CliError;

#[derive(Args)]
pub struct VerifyArgs {
    /// Seed for the randomized draws inside the suite.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

pub fn run(args: VerifyArgs) -> Result<(), CliError> {
    let results = run_all(args.seed);
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status}  {:<width$}  {}", r.name, r.detail);
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("verify: {passed}/{} checks passed (seed {})", results.len(), args.seed);

    let failing: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(format!(
            "failing checks: {}",
            failing.join(", ")
        )))
    }
}

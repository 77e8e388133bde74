//! The `validate` subcommand: run the library's invariant suite against the
//! configured parameters and report one line per check.

use crate::config::ScenarioConfig;
use crate::scenario::load_or_build_basis;
use anyhow::{bail, Result};
use wannier_stark::validate::run_invariant_suite;

pub fn cmd_validate(cfg: &ScenarioConfig) -> Result<()> {
    let (basis, _) = load_or_build_basis(cfg)?;
    let results = run_invariant_suite(&cfg.params, &basis, cfg.seed)?;
    let mut failures = 0;
    for r in &results {
        let verdict = if r.pass() { "PASS" } else { "FAIL" };
        println!(
            "[{verdict}] {:<38} residual {:>12.3e}  threshold {:>8.1e}",
            r.name, r.residual, r.threshold
        );
        if !r.pass() {
            failures += 1;
        }
    }
    println!("{} checks, {} failed (seed {})", results.len(), failures, cfg.seed);
    if failures > 0 {
        bail!("{failures} validation checks failed");
    }
    Ok(())
}

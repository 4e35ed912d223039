//! The two-state Grover chain against its closed-form spectrum.
//!
//! cargo run --example grover

use quantized_walk::experiments::{grover_grid, grover_regression};

fn main() -> quantized_walk::Result<()> {
    let report = grover_regression(&grover_grid(50, 0.01, 0.99))?;
    for case in report.cases.iter().step_by(7) {
        let worst = case.checks.iter().map(|c| c.diff).fold(0.0, f64::max);
        println!("p = {:.4}  theta = {:+.6}  worst diff {worst:.1e}  {}", case.p, case.theta, if case.passed() { "ok" } else { "FAIL" });
    }
    println!("all {} cases passed: {}", report.cases.len(), report.all_passed);
    Ok(())
}

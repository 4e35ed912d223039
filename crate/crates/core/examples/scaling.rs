//! Hitting times against the marked fraction: quantum grows like
//! 1/sqrt(eps), classical like 1/eps.
//!
//! cargo run --release --example scaling

use quantized_walk::experiments::{default_epsilons, hitting_scaling, ChainFamily, DEFAULT_K_CAP, HITTING_THRESHOLD};

fn main() -> quantized_walk::Result<()> {
    let report = hitting_scaling(&ChainFamily::Uniform { n: 128 }, &default_epsilons(), HITTING_THRESHOLD, DEFAULT_K_CAP)?;
    println!("{:>10} {:>8} {:>12} {:>10}", "epsilon", "K quant", "crossing", "tests");
    for pt in &report.points {
        println!("{:>10.6} {:>8} {:>12.4} {:>10}", pt.epsilon, pt.k_hit_quantum, pt.k_cross_quantum, pt.classical_tests);
    }
    println!(
        "exponents: quantum {:.3} (residual {:.3}), classical {:.3} (residual {:.3})",
        report.quantum_fit.exponent, report.quantum_fit.residual, report.classical_fit.exponent, report.classical_fit.residual
    );
    Ok(())
}

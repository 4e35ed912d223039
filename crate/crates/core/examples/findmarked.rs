//! Classical and quantum FindMarked on a uniform chain with one marked state.
//!
//! cargo run --example findmarked

use quantized_walk::findmarked::{
    amp_curve, classical_failure_probability, classical_find_marked, decision_procedure, DecisionConfig,
    QuantumDetector,
};
use quantized_walk::linalg::size_cap;
use quantized_walk::markov::{uniform_chain, MarkedSet};

fn main() -> quantized_walk::Result<()> {
    let n = 16;
    let p = uniform_chain(n)?;
    let g = MarkedSet::new(n, [5])?;

    let runs = 2000;
    let k = 20;
    let hits: u32 = (0..runs).map(|s| classical_find_marked(&p, &g, k, s).map(|o| o.output_bit as u32)).sum::<Result<_, _>>()?;
    let exact = 1.0 - classical_failure_probability(&p, &g, k)?;
    println!("classical, K = {k}: {:.4} observed, {exact:.4} exact", hits as f64 / runs as f64);

    let det = QuantumDetector::new(&p, &g, size_cap())?;
    let curve = det.curve(12);
    for (k, prob) in curve.iter().enumerate() {
        println!("quantum, K = {k:2}: Pr[output 1] = {prob:.6}");
    }

    let amps = amp_curve(&p, &g, 200)?;
    println!("<u, u'> = {:.6}, spectral vs direct amp gap {:.1e}", amps.overlap, amps.max_discrepancy());

    let cfg = DecisionConfig { epsilon: 1.0 / 16.0, rounds: 3000, ..Default::default() };
    let empty = decision_procedure(&p, |_| false, &cfg, size_cap())?;
    let large = decision_procedure(&p, |i| i == 5, &cfg, size_cap())?;
    println!("empty set: {:?} after {} rounds", empty.decision, empty.rounds_run);
    println!(
        "one marked: {:?} at round {:?}, per-round probability {:.4}, cost {}",
        large.decision,
        large.first_hit,
        large.round_probability,
        large.ledger.total()
    );
    Ok(())
}

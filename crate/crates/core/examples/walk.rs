//! Build the walk operator of a lazy cycle, check that the stationary state
//! is fixed, and follow a basis state for a few steps.
//!
//! cargo run --example walk

use quantized_walk::linalg::{max_abs, size_cap, CMat};
use quantized_walk::markov::lazy_cycle_chords;
use quantized_walk::walk::{stationary_state, walk_unitary, BipartiteWalk, QuantumState};

fn main() -> quantized_walk::Result<()> {
    let n = 7;
    let p = lazy_cycle_chords(n)?;
    let op = walk_unitary(BipartiteWalk::from_chain(&p)?, size_cap())?;
    let mu = op.dense_mu().expect("49 states are materialized");
    let defect = max_abs(&(mu * mu.adjoint() - CMat::identity(n * n, n * n)));
    println!("unitarity defect {defect:.1e}");

    let u = stationary_state(&p)?;
    let drift = (op.apply_power(&u, 1000)?.amplitudes() - u.amplitudes()).norm();
    println!("|mu^1000 u - u| = {drift:.1e}");

    let start = QuantumState::basis(vec![n, n], &[0, 0])?;
    let mut x = start.clone();
    for k in 1..=8 {
        x = op.apply(&x)?;
        let back = start.amplitudes().dotc(x.amplitudes()).norm_sqr();
        println!("K = {k}: return probability {back:.6}");
    }

    let spectrum = op.spectrum()?;
    let far = spectrum.apply_power(&start, 1_000_000)?;
    println!("K = 10^6 via eigenbasis: norm {:.12}", far.norm());
    Ok(())
}

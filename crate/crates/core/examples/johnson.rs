//! Collision search over 2-subsets of a 6-element set.
//!
//! cargo run --example johnson

use quantized_walk::experiments::johnson_demo;
use quantized_walk::findmarked::DecisionConfig;
use quantized_walk::linalg::size_cap;

fn main() -> quantized_walk::Result<()> {
    let cfg = DecisionConfig { seed: 1, ..Default::default() };
    for collision in [None, Some((1, 4))] {
        let r = johnson_demo(6, 2, collision, &cfg, size_cap())?;
        println!(
            "collision {:?}: {} states, {} marked, gap {:.6} (closed form {:.6}), decision {:?}, cost {}",
            collision,
            r.states,
            r.marked,
            r.one_sided_gap,
            r.gap_closed_form,
            r.decision.decision,
            r.ledger.total()
        );
    }
    Ok(())
}

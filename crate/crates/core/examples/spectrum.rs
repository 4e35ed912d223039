//! Lift the discriminant spectrum of a random chain to the walk operator and
//! compare it with a brute-force eigendecomposition.
//!
//! cargo run --example spectrum

use quantized_walk::linalg::unit_multiset_distance;
use quantized_walk::markov::random_symmetric_chain;
use quantized_walk::spectral::{brute_force_mu, lift};
use quantized_walk::walk::BipartiteWalk;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> quantized_walk::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = random_symmetric_chain(6, 0.4, &mut rng)?;
    let walk = BipartiteWalk::from_chain(&p)?;
    let spectrum = lift(&walk)?;

    println!("ambient {}  busy {}  idle {}", spectrum.ambient_dim, spectrum.busy_dim, spectrum.idle_dim);
    println!("{:>10} {:>12} {:>12} {:>10} {:>10}", "lambda", "re mu", "im mu", "theta", "norm");
    for row in spectrum.table() {
        println!("{:>10.6} {:>12.8} {:>12.8} {:>10.6} {:>10.6}", row.lambda, row.mu_re, row.mu_im, row.theta, row.norm);
    }

    let (_, brute) = brute_force_mu(&walk.left_system(), &walk.right_system(), 4096)?;
    let dist = unit_multiset_distance(&spectrum.eigenvalues(), &brute.values).expect("same dimension");
    println!("max eigenvalue mismatch against brute force: {dist:.2e}");
    Ok(())
}

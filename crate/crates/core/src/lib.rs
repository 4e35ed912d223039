//! Quantized bipartite walks of Markov chains and quantum search for marked
//! states.

pub mod error;
pub mod linalg;
pub mod markov;
pub mod spectral;
pub mod walk;
pub mod findmarked;
pub mod experiments;
pub mod cli;

pub use error::{Error, Result};

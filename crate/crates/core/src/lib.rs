//! Steps-to-quality benchmarks for Sherrington-Kirkpatrick spin glasses.
//!
//! Five heuristics are measured on the same random instances: brute force,
//! random sampling and Metropolis-Hastings annealing run classically, while
//! Grover adaptive search and the qubitized Metropolis walk are simulated
//! exactly. Step counts are fitted to `b * N^c` with `N = 2^n` and converted
//! into wall-clock projections through per-step FLOP and Toffoli models.

pub mod analysis;
pub mod benchmark;
pub mod classical;
pub mod error;
pub mod quantum;
pub mod rng;
pub mod sk_model;

pub use error::{Error, Result};

//! Classical simulation of Grover adaptive search and the qubitized
//! Metropolis walk.

mod grover;
mod walk;

pub use grover::{gas_run, gas_run_counts, grover_success_prob, GasParams, GasRound, GroverRun};
pub use walk::{
    build_walk, build_walk_capped, energy_expectation, lhpst_anneal, lhpst_anneal_from, phase_gap,
    WalkLayout, WalkOperators, WalkStart, WalkState, DEFAULT_STATEVECTOR_CAP,
};

//! Classical heuristics and the exact Markov-chain objects behind
//! Metropolis-Hastings.

mod heuristics;
mod markov;
mod schedule;

pub use heuristics::{
    bit_flip_neighbor, brute_force_steps, brute_force_steps_with, mh_anneal, mh_anneal_with,
    random_sampling_trajectory, MetropolisWalker, MhOptions, RandomSampler,
};
pub use markov::{
    gibbs_distribution, spectral_gap, transition_matrix, GibbsDist, MarkovMatrix,
    DEFAULT_MATRIX_CAP,
};
pub use schedule::AnnealSchedule;

//! Request pooling: hyperedge enumeration, weights and matching.

pub mod hyperedge;
pub mod matching;
pub mod weights;

pub use hyperedge::{best_sequence, enumerate_hyperedges, neighbors, vertex_order, Hyperedge, Hypergraph};
pub use matching::{
    greedy_match, greedy_round, randomized_round, run_matching, solve_relaxation, Matching, MatchingError,
    MatchingMethod, Relaxation,
};
pub use weights::{weight, WeightFn};

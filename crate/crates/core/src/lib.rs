//! Symmetric strategy optimization in common-payoff games.

pub mod analysis;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod gamut;
pub mod harness;
pub mod optimize;
pub mod rng;
pub mod symmetry;
mod tensor;

pub use error::{Error, Result};
pub use game::{
    best_response_set, deviation_utility, expected_utility, make_common_payoff_game, Game, Payoffs, PureProfile,
    StrategyProfile,
};
pub use optimize::{best_of_runs, BestOfRuns, Method, OptRun, OptimizerConfig};
pub use symmetry::{
    all_symmetries, expand_symmetric, generate_group, is_invariant, is_symmetry, orbits, OrbitPartition, Permutation,
    SymmetryGroup,
};

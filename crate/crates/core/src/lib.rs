//! Cost solvers for two-party non-local games.
//!
//! A game assigns a cost `C(a,b|s,t)` to every answer pair `(a,b)` on every
//! input pair `(s,t)`, with inputs drawn from a distribution `π`. This crate
//! computes:
//!
//! * the exact classical cost by enumerating deterministic strategies
//!   ([`classical`]),
//! * the cost of explicit quantum strategies and the closed-form CHSH and
//!   Hardy strategies ([`quantum`]),
//! * heuristic upper bounds on the quantum cost via see-saw optimization
//!   ([`seesaw`]),
//! * lower bounds over all non-signalling behaviors via a dense simplex
//!   ([`ns`], [`simplex`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classical;
mod error;
pub mod game;
pub mod linalg;
pub mod ns;
pub mod quantum;
pub mod seesaw;
pub mod simplex;

pub use classical::{classical_cost, classical_optima, strategy_cost, DeterministicStrategy};
pub use error::Error;
pub use game::{
    cap_infinities, make_chsh_game, make_family_game, make_hardy_game, validate_game, ExtCost,
    FamilyParams, Game, GameIssue, GameParts,
};
pub use ns::{behavior_cost, is_nonsignalling, ns_lower_bound};
pub use quantum::{
    behavior_of, chsh_optimal_strategy, evaluate_quantum_strategy, hardy_strategy,
    optimize_hardy_theta, Behavior, QuantumStrategy,
};
pub use seesaw::{seesaw_upper_bound, SeesawConfig, SeesawReport};

/// Probability below which an infinite-cost event is treated as impossible.
pub const IMPOSSIBLE_EVENT_TOL: f64 = 1e-12;

//! Time-varying undirected communication graphs.
//!
//! A [`GraphSchedule`] yields one doubly stochastic [`AdjacencyMatrix`] per
//! communication slot. Iteration `k` of the algorithm consumes the `k` slots
//! starting at [`slots_before`]`(k)` and mixes with their ordered product,
//! see [`consensus_weights`].

mod adjacency;
mod consensus;
mod schedule;
mod validate;

pub use adjacency::{
    metropolis_weights, parse_matrix_list, AdjacencyMatrix, GENERATED_TOL, USER_TOL,
};
pub use consensus::{
    consensus_weights, geometric_constants, slots_before, slots_through, transition_matrix,
    GeometricConstants,
};
pub use schedule::{
    alternating_path_schedule, random_periodic_schedule, random_spanning_tree, topology,
    GraphSchedule, ScheduleKind,
};
pub use validate::{validate_schedule, ValidationReport};

//! The learning dynamics as Markov chains.
//!
//! In payoff space the chain lives on exact rational states normalized so
//! each agent's first coordinate is zero; [`enumerate_states`],
//! [`return_path`] and [`check_irreducible`] work there. In strategy space
//! the stochastic MWU kernel is [`primal_kernel`]. Occupation and
//! return-time estimators read recorded trajectories.

mod dual;
mod occupation;
mod primal;

pub use dual::{
    apply_profiles, check_irreducible, common_denominator, dual_transition, enumerate_states,
    normalize_dual, payoff_denominator, return_path, DualState, Edge, IrreducibilityReport,
    StateGraph,
};
pub use occupation::{
    empirical_occupation, occupation_between, return_time_samples, OccupationStats, Region,
    ReturnTimes, WindowOccupation, DEFAULT_WINDOW,
};
pub use primal::{primal_kernel, pure_stationarity_check, pure_vertices, StationarityReport};

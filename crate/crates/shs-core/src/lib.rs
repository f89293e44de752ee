//! Average age of information for edge-offloading topologies, computed from
//! stochastic hybrid system models over finite-state Markov chains.

pub mod equitable;
pub mod error;
pub mod linalg;
pub mod model;
pub mod occupancy;
pub mod priority;
pub mod solve;

pub use equitable::{
    build_equitable_model, exogenous_rate, transmitter_throughput, EquitableRates, OtherDevice,
};
pub use error::{Result, ShsError};
pub use model::{RateSymbol, ResetMap, ShsModel, StateId, StateInfo, Transition};
pub use occupancy::{busy_fraction, secondary_busy_fraction};
pub use priority::{
    build_primary_model, build_secondary_model, primary_aoi_closed_form, PrimaryRates,
    SecondaryRates,
};
pub use solve::{
    average_aoi, reachable_states, solve_correlation, solve_steady_state, CorrelationVector,
    SteadyState,
};

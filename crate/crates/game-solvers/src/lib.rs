//! Costs and equilibrium solvers for edge-computing offloading games.
//!
//! Equitable access: every device owns a transmitter and shares the edge
//! server ([`mfe_solve`], [`nash_solve`]). Priority access: a primary device
//! lends its transmitter to a population of secondary devices
//! ([`mm_mfe_solve`]).

mod config;
mod cost;
mod descent;
mod error;
mod mfe;
mod mm;
mod nash;
mod policy;

pub use config::SolverConfig;
pub use cost::{
    cost_equitable, cost_mf_equitable, cost_mf_primary, cost_mf_secondary, cost_primary,
    cost_secondary, mf_exogenous_rate, primary_aoi, CostBreakdown, PrimaryCost, PrimaryView,
    SecondaryCost,
};
pub use descent::{block_descent, fd_gradient, grid_minimize, project_box, Descent, DescentParams};
pub use error::{Result, SolverError};
pub use mfe::{
    best_response, best_response_multi, consistency_equitable, mfe_solve, mfe_solve_from,
    EquilibriumResult, MeanField, MfeInit, PrimaryOutcome, TypeOutcome,
};
pub use mm::{
    consistency_priority, mm_mfe_solve, mm_mfe_solve_from, primary_response, secondary_response,
    solo_primary, Market, MmInit,
};
pub use nash::{exogenous_for, finite_game_costs, nash_solve, NashResult};
pub use policy::{Bounds, DevicePolicy, TypeProfile};

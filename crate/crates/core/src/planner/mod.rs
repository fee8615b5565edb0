//! Per-velocity TDMA scheduling and the lap-count / velocity search.

mod multilap;
mod rates;
mod schedule;

pub use multilap::{
    default_velocity_set, plan_for_velocity, replay_discharge, velocity_search, VelocitySearch, Infeasibility,
    PlanSolution, PlanningContext, VelocityRow,
};
pub use rates::{compute_rates, BeamformedRates, LinkConfig, RateTable};
pub use schedule::{maxmin_schedule, Schedule};

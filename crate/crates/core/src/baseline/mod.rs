//! Comparison policies: fly-hover-communicate and the single-lap convexified solver.

mod conic;
mod convexified;
mod fly_hover;
mod single_lap;

pub use convexified::{convexified_energy, exact_slack, slack_residual, taylor_constraint};
pub use fly_hover::{fly_hover_plan, segment_form, HoverPlan};
pub use single_lap::{
    single_lap_solve, DinkelbachRun, SingleLapConfig, SingleLapResult, SingleLapState, TraceRow,
};

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error("ground node {0} has zero rate at every LoI")]
    Unserved(usize),
    #[error("initial plan exceeds the hover endurance")]
    InitInfeasible,
    #[error("convex subproblem failed: {0}")]
    Solver(String),
}

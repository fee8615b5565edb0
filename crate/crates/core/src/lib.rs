#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod battery;
pub mod geometry;
pub mod numeric;
pub mod power;
pub mod registry;
pub mod channel;
pub mod irs;
pub mod coverage;
pub mod lp;
pub mod planner;
pub mod baseline;
pub mod scenario;
pub mod policy;
pub mod report;
pub mod experiments;

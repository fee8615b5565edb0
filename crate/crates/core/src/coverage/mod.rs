//! Area coverage, LoI selection, IRS siting and path construction.

mod packing;
mod patterns;
mod placement;
mod route;

pub use packing::{
    circle_count, expand_tiers, multi_tier_pack, optimal_pattern, packing_registry, CoverSet, FixedMultilevel,
    MultiTier, PackingStrategy, PropositionGreedy,
};
pub use patterns::{covering_radius, lambda, pattern, PackingPattern, MAX_PATTERN};
pub use placement::{place_irs, select_lois, CoverageError, Loi, LoiRule, PlacementConfig};
pub use route::{build_path, visit_order, FlightPath, EXACT_TSP_LIMIT};

//! Mission policies selectable by name.

use crate::baseline::{fly_hover_plan, single_lap_solve, BaselineError, SingleLapConfig};
use crate::planner::{velocity_search, PlanSolution, PlanningContext};
use crate::registry::{Named, Registry};

#[derive(Debug, thiserror::Error)]
pub enum PolicyError {
    #[error("no velocity in the set yields a feasible plan")]
    NoFeasiblePlan,
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

pub trait Policy: Named + Send + Sync {
    fn plan(&self, ctx: &PlanningContext) -> Result<PlanSolution, PolicyError>;
}

/// Repeated laps at a common speed, velocity chosen for best GEE.
pub struct MultiLap {
    pub velocities: Vec<f64>,
    pub early_break: bool,
}

/// Whole file delivered in one lap with per-segment speeds.
pub struct SingleLap {
    pub config: SingleLapConfig,
}

/// Transmit only while hovering over LoIs.
pub struct FlyHover;

impl Named for MultiLap {
    fn name(&self) -> &'static str {
        "multi-lap"
    }
}
impl Named for SingleLap {
    fn name(&self) -> &'static str {
        "single-lap"
    }
}
impl Named for FlyHover {
    fn name(&self) -> &'static str {
        "fly-hover"
    }
}

impl Policy for MultiLap {
    fn plan(&self, ctx: &PlanningContext) -> Result<PlanSolution, PolicyError> {
        velocity_search(ctx, &self.velocities, self.early_break).best.ok_or(PolicyError::NoFeasiblePlan)
    }
}

impl Policy for SingleLap {
    fn plan(&self, ctx: &PlanningContext) -> Result<PlanSolution, PolicyError> {
        let init = fly_hover_plan(ctx)?;
        Ok(single_lap_solve(ctx, &init, &self.config)?.plan)
    }
}

impl Policy for FlyHover {
    fn plan(&self, ctx: &PlanningContext) -> Result<PlanSolution, PolicyError> {
        Ok(fly_hover_plan(ctx)?.to_solution(ctx))
    }
}

pub fn policy_registry(velocities: &[f64], early_break: bool, single_lap: SingleLapConfig) -> Registry<dyn Policy> {
    let mut r: Registry<dyn Policy> = Registry::new("policy");
    r.register(Box::new(MultiLap { velocities: velocities.to_vec(), early_break }))
        .register(Box::new(SingleLap { config: single_lap }))
        .register(Box::new(FlyHover));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::BatteryModel;
    use crate::coverage::build_path;
    use crate::geometry::{Point2, Point3};
    use crate::planner::RateTable;
    use crate::power::UavParams;

    fn ctx(q: f64) -> PlanningContext {
        let o = Point3::new(0.0, 0.0, 100.0);
        let path = build_path(&[Point2::new(30.0, 0.0)], o, o, 2.0, 100.0);
        let rows = path
            .segment_points()
            .iter()
            .map(|p| vec![2e8 / (1.0 + ((p.x - 30.0) / 10.0).powi(2))])
            .collect();
        PlanningContext::new(path, RateTable::new(rows), UavParams::default(), BatteryModel::default_fitted(), q, 1.0)
            .unwrap()
    }

    fn registry() -> Registry<dyn Policy> {
        policy_registry(&[2.0, 5.0, 10.0, 15.0], false, SingleLapConfig::default())
    }

    #[test]
    fn names() {
        let mut names = registry().names();
        names.sort_unstable();
        assert_eq!(names, vec!["fly-hover", "multi-lap", "single-lap"]);
        assert!(registry().get("hover-only").is_err());
    }

    #[test]
    fn every_policy_delivers() {
        let c = ctx(5e8);
        for p in registry().iter() {
            let plan = p.plan(&c).unwrap();
            assert_eq!(plan.policy, p.name());
            for b in &plan.bits_per_gn {
                assert!(*b >= c.q_bits * (1.0 - 1e-6), "{}: {b}", p.name());
            }
        }
    }

    #[test]
    fn empty_velocity_set_infeasible() {
        let p = MultiLap { velocities: Vec::new(), early_break: false };
        assert!(matches!(p.plan(&ctx(1e8)), Err(PolicyError::NoFeasiblePlan)));
    }
}

use super::{maxmin_schedule, RateTable, Schedule};
use crate::battery::{flight_time, BatteryModel};
use crate::coverage::FlightPath;
use crate::lp::LpError;
use crate::power::{total_power, UavParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Everything the velocity search needs once the path and rates are fixed.
#[derive(Debug, Clone)]
pub struct PlanningContext {
    pub path: FlightPath,
    pub rates: RateTable,
    pub uav: UavParams,
    pub battery: BatteryModel,
    /// File size per GN, bits.
    pub q_bits: f64,
    /// Discharge simulation step, s.
    pub dt: f64,
    /// Schedule at unit speed; scales as 1/v.
    unit: Schedule,
}

impl PlanningContext {
    pub fn new(
        path: FlightPath,
        rates: RateTable,
        uav: UavParams,
        battery: BatteryModel,
        q_bits: f64,
        dt: f64,
    ) -> Result<Self, LpError> {
        assert!(q_bits > 0.0, "file size must be positive");
        assert_eq!(rates.segments(), path.n_segments(), "one rate row per segment");
        let unit = maxmin_schedule(&rates, &path.segment_lengths())?;
        Ok(Self { path, rates, uav, battery, q_bits, dt, unit })
    }

    pub fn with_file_size(&self, q_bits: f64) -> Self {
        Self { q_bits, ..self.clone() }
    }

    pub fn unit_schedule(&self) -> &Schedule {
        &self.unit
    }

    pub fn n_gns(&self) -> usize {
        self.rates.gns()
    }

    /// Peukert-limited endurance at constant power, s.
    pub fn t_max(&self, power: f64) -> f64 {
        flight_time(&self.battery, power, self.dt).duration
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSolution {
    pub policy: String,
    /// Average ground speed over the mission, m/s.
    pub velocity: f64,
    pub segment_velocities: Vec<f64>,
    /// Time per segment per lap, s.
    pub t_m: Vec<f64>,
    pub t_mn: Vec<Vec<f64>>,
    pub n_lap: usize,
    /// Hover time at LoIs, s (fly-hover only).
    pub hover_time: f64,
    pub mission_time: f64,
    pub energy_total: f64,
    pub bits_per_gn: Vec<f64>,
    pub gee: f64,
}

impl PlanSolution {
    /// `N·Q / E`.
    pub fn recomputed_gee(&self, q_bits: f64) -> f64 {
        self.bits_per_gn.len() as f64 * q_bits / self.energy_total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infeasibility {
    /// Some GN never gets a positive rate.
    Starved,
    /// Required laps plus one reserve lap exceed the endurance.
    Endurance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityRow {
    pub velocity: f64,
    pub power: f64,
    pub t_max: f64,
    pub lap_time: f64,
    pub t_star: f64,
    pub n_lap: usize,
    pub energy: f64,
    pub gee: f64,
    pub infeasible: Option<Infeasibility>,
}

fn laps_needed(q: f64, t_star: f64) -> usize {
    // tolerate round-off when Q is an exact multiple of t*
    ((q / t_star) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

pub fn plan_for_velocity(ctx: &PlanningContext, v: f64) -> (VelocityRow, Option<PlanSolution>) {
    assert!(v > 0.0, "velocity must be positive");
    let lens = ctx.path.segment_lengths();
    let t_m: Vec<f64> = lens.iter().map(|l| l / v).collect();
    let lap_time: f64 = t_m.iter().sum();
    let power = total_power(&ctx.uav, v);
    let t_max = ctx.t_max(power);
    let sched = ctx.unit.scaled_time(1.0 / v);
    let mut row = VelocityRow {
        velocity: v,
        power,
        t_max,
        lap_time,
        t_star: sched.t_star,
        n_lap: 0,
        energy: f64::NAN,
        gee: 0.0,
        infeasible: None,
    };
    if !(sched.t_star > 0.0) {
        row.infeasible = Some(Infeasibility::Starved);
        return (row, None);
    }
    let n_lap = laps_needed(ctx.q_bits, sched.t_star);
    row.n_lap = n_lap;
    let energy = n_lap as f64 * lap_time * power;
    row.energy = energy;
    if (n_lap + 1) as f64 * lap_time > t_max {
        row.infeasible = Some(Infeasibility::Endurance);
        return (row, None);
    }
    let per_lap = sched.bits_per_gn(&ctx.rates);
    let n = ctx.n_gns();
    let gee = n as f64 * ctx.q_bits / energy;
    row.gee = gee;
    let plan = PlanSolution {
        policy: "multi-lap".into(),
        velocity: v,
        segment_velocities: vec![v; t_m.len()],
        t_m,
        t_mn: sched.t_mn,
        n_lap,
        hover_time: 0.0,
        mission_time: n_lap as f64 * lap_time,
        energy_total: energy,
        bits_per_gn: per_lap.iter().map(|b| b * n_lap as f64).collect(),
        gee,
    };
    (row, Some(plan))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocitySearch {
    pub best: Option<PlanSolution>,
    pub sweep: Vec<VelocityRow>,
}

/// Velocity search: best GEE over the set, optionally stopping at the first
/// feasible velocity that does not improve on the incumbent.
pub fn velocity_search(ctx: &PlanningContext, velocities: &[f64], early_break: bool) -> VelocitySearch {
    let evaluated: Vec<(VelocityRow, Option<PlanSolution>)> = if early_break {
        let mut out = Vec::new();
        let mut best_gee = f64::NEG_INFINITY;
        for &v in velocities {
            let r = plan_for_velocity(ctx, v);
            let gee = r.1.as_ref().map(|p| p.gee);
            out.push(r);
            if let Some(g) = gee {
                if g <= best_gee {
                    break;
                }
                best_gee = g;
            }
        }
        out
    } else {
        velocities.par_iter().map(|&v| plan_for_velocity(ctx, v)).collect()
    };
    let mut best: Option<PlanSolution> = None;
    let mut sweep = Vec::with_capacity(evaluated.len());
    for (row, plan) in evaluated {
        if let Some(p) = plan {
            if best.as_ref().is_none_or(|b| p.gee > b.gee) {
                best = Some(p);
            }
        }
        sweep.push(row);
    }
    VelocitySearch { best, sweep }
}

/// Re-run the discharge model over the planned flight (all laps at constant
/// power) and check the terminal voltage stays above cut-off throughout.
pub fn replay_discharge(ctx: &PlanningContext, plan: &PlanSolution) -> bool {
    let power = total_power(&ctx.uav, plan.velocity);
    let r = flight_time(&ctx.battery, power, ctx.dt);
    let needed = (plan.mission_time / ctx.dt).ceil() as usize;
    r.steps >= needed && r.voltages.iter().take(needed).all(|&v| v >= ctx.battery.v_cutoff)
}

pub fn default_velocity_set() -> Vec<f64> {
    (1..=25).map(|v| v as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::build_path;
    use crate::geometry::{Point2, Point3};
    use crate::power::min_power_velocity;

    fn ctx(rates: Vec<f64>, q: f64) -> PlanningContext {
        let o = Point3::new(0.0, 0.0, 100.0);
        let path = build_path(&[Point2::new(50.0, 0.0)], o, o, 1.0, 100.0);
        let m = path.n_segments();
        let table = RateTable::new(vec![rates; m]);
        PlanningContext::new(
            path,
            table,
            UavParams::default(),
            BatteryModel::default_fitted(),
            q,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn single_lap_when_q_small() {
        let c = ctx(vec![1e9], 1e6);
        let (row, plan) = plan_for_velocity(&c, 10.0);
        assert_eq!(row.n_lap, 1);
        assert_eq!(plan.unwrap().n_lap, 1);
    }

    #[test]
    fn doubling_q_at_most_doubles_laps() {
        for q in [3.3e9, 7.7e9, 1.2e10] {
            let a = plan_for_velocity(&ctx(vec![2e7, 3e7], q), 12.0).0.n_lap;
            let b = plan_for_velocity(&ctx(vec![2e7, 3e7], 2.0 * q), 12.0).0.n_lap;
            assert!(b <= 2 * a && b >= a);
        }
    }

    #[test]
    fn huge_rate_picks_min_power_speed() {
        let c = ctx(vec![1e12], 1e6);
        let r = velocity_search(&c, &default_velocity_set(), false);
        let best = r.best.unwrap();
        assert_eq!(best.n_lap, 1);
        // one lap, fixed length: energy ∝ P(v)/v, minimised at max-range speed
        let p = UavParams::default();
        let v_mr = (1..=25)
            .map(|v| v as f64)
            .min_by(|a, b| (total_power(&p, *a) / a).total_cmp(&(total_power(&p, *b) / b)))
            .unwrap();
        assert_eq!(best.velocity, v_mr);
        assert!(v_mr > min_power_velocity(&p, 30.0));
    }

    #[test]
    fn invariants_hold() {
        let c = ctx(vec![2e7, 5e6, 1e7], 2e9);
        let r = velocity_search(&c, &default_velocity_set(), false);
        let p = r.best.unwrap();
        for (m, row) in p.t_mn.iter().enumerate() {
            assert!(row.iter().sum::<f64>() <= p.t_m[m] + 1e-9);
            assert!(row.iter().all(|&t| t >= 0.0));
        }
        assert!(p.bits_per_gn.iter().all(|&b| b >= c.q_bits * (1.0 - 1e-9)));
        let lap: f64 = p.t_m.iter().sum();
        assert!((p.n_lap + 1) as f64 * lap <= c.t_max(total_power(&c.uav, p.velocity)));
        assert!((p.gee - p.recomputed_gee(c.q_bits)).abs() <= 1e-12 * p.gee);
        assert!(replay_discharge(&c, &p));
    }

    #[test]
    fn early_break_stops_sooner() {
        let c = ctx(vec![2e7, 5e6], 2e9);
        let full = velocity_search(&c, &default_velocity_set(), false);
        let eb = velocity_search(&c, &default_velocity_set(), true);
        assert!(eb.sweep.len() <= full.sweep.len());
        assert!(eb.best.unwrap().gee <= full.best.unwrap().gee);
    }

    #[test]
    fn deterministic() {
        let a = velocity_search(&ctx(vec![2e7, 5e6], 2e9), &default_velocity_set(), false);
        let b = velocity_search(&ctx(vec![2e7, 5e6], 2e9), &default_velocity_set(), false);
        assert_eq!(a, b);
    }
}

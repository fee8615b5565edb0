use super::BaselineError;
use crate::planner::{PlanSolution, PlanningContext};
use crate::power::{hover_equivalent_velocity, total_power};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoverPlan {
    /// LoIs in visiting order.
    pub loi_order: Vec<usize>,
    /// Hover time at each visited LoI, s.
    pub hover_times: Vec<f64>,
    /// For each GN, the position in `loi_order` it is served from.
    pub serving_stop: Vec<usize>,
    /// Transmit time per GN at its serving stop, s.
    pub gn_times: Vec<f64>,
    pub v_max: f64,
    pub fly_time: f64,
    pub energy: f64,
    pub gee: f64,
    /// Whether hover plus flight fits the hover endurance.
    pub within_endurance: bool,
}

impl HoverPlan {
    pub fn total_hover(&self) -> f64 {
        self.hover_times.iter().sum()
    }
}

/// Fly between LoIs at the hover-equivalent speed and serve each GN while
/// hovering over the LoI with the best rate to it.
pub fn fly_hover_plan(ctx: &PlanningContext) -> Result<HoverPlan, BaselineError> {
    let path = &ctx.path;
    let d = &ctx.rates.d;
    let n = ctx.n_gns();
    let stops = &path.loi_waypoints;
    let mut serving_stop = Vec::with_capacity(n);
    let mut gn_times = Vec::with_capacity(n);
    let mut hover_times = vec![0.0; stops.len()];
    for g in 0..n {
        let best = stops
            .iter()
            .enumerate()
            .map(|(j, &w)| (j, d[w.min(d.len() - 1)][g]))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, rate)) = best.filter(|b| b.1 > 0.0) else {
            return Err(BaselineError::Unserved(g));
        };
        let t = ctx.q_bits / rate;
        serving_stop.push(j);
        gn_times.push(t);
        hover_times[j] += t;
    }
    let v_max = hover_equivalent_velocity(&ctx.uav);
    let fly_time = path.length() / v_max;
    let p0 = total_power(&ctx.uav, 0.0);
    let hover: f64 = hover_times.iter().sum();
    let energy = p0 * hover + total_power(&ctx.uav, v_max) * fly_time;
    Ok(HoverPlan {
        loi_order: path.loi_indices.clone(),
        hover_times,
        serving_stop,
        gn_times,
        v_max,
        fly_time,
        energy,
        gee: n as f64 * ctx.q_bits / energy,
        within_endurance: hover + fly_time <= ctx.t_max(p0),
    })
}

/// The hover plan in per-segment form: each stop's hover time is folded into
/// the segment leaving that stop, with its GNs scheduled there.
pub fn segment_form(ctx: &PlanningContext, plan: &HoverPlan) -> (Vec<f64>, Vec<Vec<f64>>) {
    let lens = ctx.path.segment_lengths();
    let mut t_m: Vec<f64> = lens.iter().map(|l| l / plan.v_max).collect();
    let mut t_mn = vec![vec![0.0; ctx.n_gns()]; lens.len()];
    for (g, (&j, &t)) in plan.serving_stop.iter().zip(&plan.gn_times).enumerate() {
        let m = ctx.path.loi_waypoints[j].min(lens.len() - 1);
        t_m[m] += t;
        t_mn[m][g] += t;
    }
    (t_m, t_mn)
}

impl HoverPlan {
    pub fn to_solution(&self, ctx: &PlanningContext) -> PlanSolution {
        let (t_m, t_mn) = segment_form(ctx, self);
        PlanSolution {
            policy: "fly-hover".into(),
            velocity: self.v_max,
            segment_velocities: vec![self.v_max; t_m.len()],
            t_m,
            t_mn,
            n_lap: 1,
            hover_time: self.total_hover(),
            mission_time: self.total_hover() + self.fly_time,
            energy_total: self.energy,
            bits_per_gn: vec![ctx.q_bits; ctx.n_gns()],
            gee: self.gee,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::BatteryModel;
    use crate::coverage::build_path;
    use crate::geometry::{Point2, Point3};
    use crate::planner::RateTable;
    use crate::power::UavParams;

    fn ctx(rate: f64, q: f64) -> PlanningContext {
        let o = Point3::new(0.0, 0.0, 100.0);
        let path = build_path(&[Point2::new(40.0, 0.0)], o, o, 5.0, 100.0);
        let m = path.n_segments();
        let stop = path.loi_waypoints[0];
        let d = (0..m).map(|i| vec![if i == stop { rate } else { rate * 0.5 }]).collect();
        PlanningContext::new(path, RateTable::new(d), UavParams::default(), BatteryModel::default_fitted(), q, 1.0)
            .unwrap()
    }

    #[test]
    fn hover_time_is_q_over_rate() {
        let p = fly_hover_plan(&ctx(1e8, 2e9)).unwrap();
        assert!((p.total_hover() - 20.0).abs() < 1e-12);
        assert_eq!(p.serving_stop, vec![0]);
    }

    #[test]
    fn doubling_q_doubles_hover() {
        let a = fly_hover_plan(&ctx(1e8, 1e9)).unwrap();
        let b = fly_hover_plan(&ctx(1e8, 2e9)).unwrap();
        assert!((b.total_hover() - 2.0 * a.total_hover()).abs() < 1e-12);
        assert_eq!(a.fly_time, b.fly_time);
    }

    #[test]
    fn unserved_gn_rejected() {
        assert!(matches!(fly_hover_plan(&ctx(0.0, 1e9)), Err(BaselineError::Unserved(0))));
    }

    #[test]
    fn flight_at_hover_power() {
        let c = ctx(1e8, 1e9);
        let p = fly_hover_plan(&c).unwrap();
        let p0 = total_power(&c.uav, 0.0);
        assert!((total_power(&c.uav, p.v_max) - p0).abs() < 1e-6);
        assert!((p.energy - p0 * (p.fly_time + p.total_hover())).abs() < 1e-4);
    }

    #[test]
    fn segment_form_delivers() {
        let c = ctx(1e8, 1e9);
        let p = fly_hover_plan(&c).unwrap();
        let (t_m, t_mn) = segment_form(&c, &p);
        let bits: f64 = t_mn.iter().zip(&c.rates.d).map(|(t, d)| t[0] * d[0]).sum();
        assert!((bits - 1e9).abs() < 1e-3);
        for (m, row) in t_mn.iter().enumerate() {
            assert!(row.iter().sum::<f64>() <= t_m[m]);
        }
    }
}

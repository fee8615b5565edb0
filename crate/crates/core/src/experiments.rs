//! Experiment drivers producing tables and summaries.

use crate::baseline::{fly_hover_plan, single_lap_solve, SingleLapResult};
use crate::battery::{flight_time, naive_flight_time, sizing_sweep, BatteryModel};
use crate::channel::{complex_channel, pap_gn_loss, ChannelParams};
use crate::coverage::{packing_registry, PlacementConfig};
use crate::geometry::Point3;
use crate::irs::{cascade_channel, direct_channel, phase_registry, rate, visible, IrsError, IrsModule};
use crate::planner::{replay_discharge, velocity_search, VelocitySearch, PlanSolution};
use crate::policy::policy_registry;
use crate::power::{total_power, GRAVITY};
use crate::report::{ExperimentResult, Provenance, Table};
use crate::scenario::{Prepared, Scenario, ScenarioError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn provenance(sc: &Scenario) -> Provenance {
    Provenance::new(sc.hash(), sc.seed)
}

/// Fitted regressions and their agreement with the datasheet.
pub fn run_fit_battery(sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    let m = sc.battery_model()?;
    let pts = match &sc.battery.datasheet {
        Some(p) => crate::battery::load_datasheet(p)?,
        None => crate::battery::parse_datasheet(crate::battery::DEFAULT_DATASHEET)?,
    };
    let mut res = ExperimentResult::new("fit_battery", provenance(sc));
    let mut t = Table::new("fit", &["current_A", "v_max_V", "v_max_fit", "v_min_V", "v_min_fit", "e_max_Wh", "e_max_fit"]);
    for p in &pts {
        t.push(vec![
            p.current,
            p.v_max,
            m.f_vmax.eval(p.current),
            p.v_min,
            m.f_vmin.eval(p.current),
            p.e_max,
            m.f_e.eval(p.current),
        ]);
    }
    res.tables.push(t);
    res.set("r2_v_max", m.fit_r2[0]);
    res.set("r2_v_min", m.fit_r2[1]);
    res.set("r2_e_max", m.fit_r2[2]);
    res.set("model", &m);
    Ok(res)
}

/// Mass of the airframe with the configured pack, kg.
fn pack_mass_total(sc: &Scenario, m: &BatteryModel) -> f64 {
    sc.battery.body_mass + m.pack_mass()
}

/// Flight time against speed: Peukert with the configured cut-off, with zero
/// cut-off, and the naive capacity estimate.
pub fn run_flight_time_sweep(sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    let m = sc.battery_model()?;
    let uav = sc.uav.with_mass(pack_mass_total(sc, &m));
    let no_cut = m.clone().with_cutoff(0.0);
    let dt = sc.battery.dt;
    let rows: Vec<Vec<f64>> = sc
        .experiments
        .flight_velocities
        .par_iter()
        .map(|&v| {
            let p = total_power(&uav, v);
            vec![
                v,
                p,
                flight_time(&m, p, dt).minutes(),
                flight_time(&no_cut, p, dt).minutes(),
                naive_flight_time(&m, p) / 60.0,
            ]
        })
        .collect();
    let mut t = Table::new("flight_time", &["velocity_mps", "power_W", "peukert_min", "peukert_no_cutoff_min", "naive_min"]);
    for r in rows {
        t.push(r);
    }
    let mut res = ExperimentResult::new("flight_time", provenance(sc));
    let peak = t.rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).map(|r| (r[0], r[2]));
    let hover = flight_time(&m, total_power(&uav, 0.0), dt).minutes();
    res.set("mass_kg", pack_mass_total(sc, &m));
    res.set("n_cells", m.n_cells);
    res.set("hover_min", hover);
    if let Some((v, mins)) = peak {
        res.set("peak_velocity_mps", v);
        res.set("peak_min", mins);
    }
    res.tables.push(t);
    Ok(res)
}

pub fn run_battery_sizing(sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    let m = sc.battery_model()?;
    let b = &sc.battery;
    let rows = sizing_sweep(
        b.body_mass * GRAVITY,
        m.cell_weight,
        b.sizing_min_cells..=b.sizing_max_cells,
        b.max_takeoff_mass,
        &sc.uav,
        &m,
    )?;
    let mut t = Table::new("sizing", &["n_cells", "hover_min", "within_takeoff_limit"]);
    for r in &rows {
        t.push(vec![r.n_cells as f64, r.hover_minutes, if r.constrained { 0.0 } else { 1.0 }]);
    }
    let mut res = ExperimentResult::new("battery_sizing", provenance(sc));
    let best = |it: &mut dyn Iterator<Item = &crate::battery::SizingRow>| {
        it.max_by(|a, b| a.hover_minutes.total_cmp(&b.hover_minutes)).map(|r| (r.n_cells, r.hover_minutes))
    };
    if let Some((n, h)) = best(&mut rows.iter()) {
        res.set("unconstrained_best_cells", n);
        res.set("unconstrained_best_min", h);
        let lo = rows.first().map(|r| r.n_cells);
        let hi = rows.last().map(|r| r.n_cells);
        res.set("unconstrained_interior", Some(n) != lo && Some(n) != hi);
    }
    if let Some((n, h)) = best(&mut rows.iter().filter(|r| !r.constrained)) {
        res.set("constrained_best_cells", n);
        res.set("constrained_best_min", h);
        let boundary = rows.iter().filter(|r| !r.constrained).map(|r| r.n_cells).max();
        res.set("constrained_boundary_cells", boundary);
    }
    res.tables.push(t);
    Ok(res)
}

/// One PAP, one GN far outside the LoS regime, one IRS near the GN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlosInstance {
    pub pap: Point3,
    pub gn: Point3,
    pub irs: IrsModule,
    /// Direct link always takes the NLoS loss (obstructed GN).
    pub direct_blocked: bool,
}

impl NlosInstance {
    /// GN `distance` metres from the PAP's ground projection along `bearing`;
    /// the IRS sits `placement.gn_distance` beside the GN, facing the GN.
    pub fn new(pap: Point3, distance: f64, bearing: f64, side: f64, placement: &PlacementConfig, blocked: bool) -> Self {
        let (c, s) = (bearing.cos(), bearing.sin());
        let gn = Point3::ground(pap.x + distance * c, pap.y + distance * s);
        // beside the GN and slightly beyond it, so PAP and GN both face the surface
        let (px, py) = (-s * side, c * side);
        let off = placement.gn_distance;
        let back: f64 = 0.25;
        let norm = (1.0 + back * back).sqrt();
        let pos = Point3::new(
            gn.x + off * (px + back * c) / norm,
            gn.y + off * (py + back * s) / norm,
            placement.height,
        );
        let normal_azimuth = (gn.y - pos.y).atan2(gn.x - pos.x);
        let irs = IrsModule {
            ref_position: pos,
            n_elements: placement.n_elements,
            elem_dx: placement.elem_dx,
            elem_dz: placement.elem_dz,
            normal_azimuth,
        };
        Self { pap, gn, irs, direct_blocked: blocked }
    }

    pub fn with_elements(&self, k: usize) -> Self {
        let mut s = self.clone();
        s.irs.n_elements = k;
        s
    }
}

/// GEE (bits/J at hover power) for the five beamforming cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrsCases {
    /// Continuous phases, amplitude ignored: what the optimiser predicts.
    pub ideal_predicted: f64,
    /// The same phases with the coupled amplitudes.
    pub ideal_actual: f64,
    /// Four-phase AO ignoring amplitude, actual.
    pub blind_actual: f64,
    pub blind_predicted: f64,
    /// Four-phase AO with the coupled amplitudes.
    pub aware_actual: f64,
    pub no_irs: f64,
}

pub fn irs_cases(inst: &NlosInstance, sc: &Scenario) -> Result<IrsCases, ScenarioError> {
    let ch: &ChannelParams = &sc.channel;
    let direct = if inst.direct_blocked {
        let l = pap_gn_loss(&inst.pap, &inst.gn, ch).map_err(IrsError::Channel)?;
        complex_channel(l.nlos_db, ch.pap_gain(&inst.pap, &inst.gn), inst.pap.dist(&inst.gn), ch.wavelength(), true)
    } else {
        direct_channel(&inst.pap, &inst.gn, ch)?
    };
    let cascades = if inst.irs.n_elements > 0 && visible(&inst.pap, &inst.irs) && visible(&inst.gn, &inst.irs) {
        vec![cascade_channel(&inst.pap, &inst.irs, &inst.gn, ch)]
    } else {
        Vec::new()
    };
    let reg = phase_registry(&sc.irs.phase_set());
    let scale = ch.tx_power_w() / ch.noise_power_w();
    let p_hover = total_power(&sc.uav, 0.0);
    let gee = |snr: f64| rate(snr, ch.bandwidth_per_gn) / p_hover;
    let amp = &sc.irs.amplitude;
    let ideal = reg.get("continuous-ideal")?.configure(direct, &cascades, amp, scale)?;
    let blind = reg.get("discrete-blind")?.configure(direct, &cascades, amp, scale)?;
    let aware = reg.get("discrete-aware")?.configure(direct, &cascades, amp, scale)?;
    let none = reg.get("none")?.configure(direct, &cascades, amp, scale)?;
    Ok(IrsCases {
        ideal_predicted: gee(ideal.predicted_snr),
        ideal_actual: gee(ideal.actual_snr),
        blind_actual: gee(blind.actual_snr),
        blind_predicted: gee(blind.predicted_snr),
        aware_actual: gee(aware.actual_snr),
        no_irs: gee(none.actual_snr),
    })
}

/// The default NLoS geometry of the IRS sweep.
pub fn default_nlos_instance(sc: &Scenario) -> NlosInstance {
    let e = &sc.experiments;
    NlosInstance::new(sc.p_initial, e.irs_sweep_distance, 0.0, 1.0, &sc.irs.placement, e.irs_sweep_blocked_direct)
}

/// Random NLoS geometries around the configured distance.
pub fn random_nlos_instances(sc: &Scenario, n: usize, seed: u64) -> Vec<NlosInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d0 = sc.experiments.irs_sweep_distance;
    (0..n)
        .map(|_| {
            let d = d0 * rng.gen_range(0.8..1.5);
            let bearing = rng.gen_range(0.0..std::f64::consts::TAU);
            let side = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            NlosInstance::new(sc.p_initial, d, bearing, side, &sc.irs.placement, sc.experiments.irs_sweep_blocked_direct)
        })
        .collect()
}

pub fn run_irs_sweep(sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    let base = default_nlos_instance(sc);
    let rows: Vec<(usize, IrsCases)> = sc
        .experiments
        .irs_elements
        .par_iter()
        .map(|&k| irs_cases(&base.with_elements(k), sc).map(|c| (k, c)))
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(
        "gee",
        &[
            "elements",
            "case1_ideal_predicted",
            "case2_ideal_actual",
            "case3_blind_actual",
            "case4_aware_actual",
            "case5_no_irs",
            "blind_predicted",
        ],
    );
    for (k, c) in &rows {
        t.push(vec![*k as f64, c.ideal_predicted, c.ideal_actual, c.blind_actual, c.aware_actual, c.no_irs, c.blind_predicted]);
    }
    let mut res = ExperimentResult::new("irs_sweep", provenance(sc));
    res.set("gn_distance_m", sc.experiments.irs_sweep_distance);
    res.set("geometry", &base);
    let reference = irs_cases(&base, sc)?;
    res.set("reference_elements", base.irs.n_elements);
    res.set("reference_area_m2", base.irs.area());
    res.set("ideal_overestimation", reference.ideal_predicted / reference.ideal_actual - 1.0);
    res.set("blind_overestimation", reference.blind_predicted / reference.blind_actual - 1.0);
    res.set("aware_vs_ideal", reference.aware_actual / reference.ideal_predicted);
    res.tables.push(t);
    Ok(res)
}

pub fn run_pack_comparison(sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    let reg = packing_registry();
    let names = ["multi-tier", "multilevel-5", "multilevel-7", "multilevel-10", "proposition-greedy"];
    let r_small = sc.experiments.pack_r_small;
    let mut cols = vec!["ratio"];
    cols.extend(names);
    cols.push("uncovered_multi_tier");
    let mut t = Table::new("circles", &cols);
    for &ratio in &sc.experiments.pack_ratios {
        let mut row = vec![ratio];
        let mut uncovered = 0.0;
        for name in names {
            let cover = reg.get(name)?.pack(ratio * r_small, r_small);
            if name == "multi-tier" {
                uncovered = cover.uncovered_samples(4000, sc.seed) as f64;
            }
            row.push(cover.len() as f64);
        }
        row.push(uncovered);
        t.push(row);
    }
    let mut res = ExperimentResult::new("pack", provenance(sc));
    res.set("r_small_m", r_small);
    res.tables.push(t);
    Ok(res)
}

#[derive(Debug, Clone)]
pub struct PlanOutput {
    pub prepared: Prepared,
    pub search: VelocitySearch,
    pub replay_ok: Option<bool>,
}

/// Full multi-lap pipeline on the scenario.
pub fn multi_lap_pipeline(sc: &Scenario) -> Result<PlanOutput, ScenarioError> {
    let prepared = sc.prepare()?;
    let ctx = prepared.context(sc)?;
    let search = velocity_search(&ctx, &sc.planner.velocities, sc.planner.early_break);
    let replay_ok = search.best.as_ref().map(|p| replay_discharge(&ctx, p));
    Ok(PlanOutput { prepared, search, replay_ok })
}

fn schedule_table(plan: &PlanSolution) -> Table {
    let n = plan.t_mn.first().map_or(0, Vec::len);
    let names: Vec<String> = (0..n).map(|i| format!("t_gn{i}")).collect();
    let mut cols: Vec<&str> = vec!["segment", "velocity_mps", "t_m"];
    cols.extend(names.iter().map(String::as_str));
    let mut t = Table::new("schedule", &cols);
    for (m, row) in plan.t_mn.iter().enumerate() {
        let mut r = vec![m as f64, plan.segment_velocities[m], plan.t_m[m]];
        r.extend(row);
        t.push(r);
    }
    t
}

fn plan_summary(res: &mut ExperimentResult, plan: &PlanSolution) {
    res.set("policy", &plan.policy);
    res.set("velocity_mps", plan.velocity);
    res.set("n_lap", plan.n_lap);
    res.set("gee_bits_per_J", plan.gee);
    res.set("energy_J", plan.energy_total);
    res.set("mission_time_s", plan.mission_time);
    res.set("bits_per_gn", &plan.bits_per_gn);
}

pub fn run_plan(sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    let out = multi_lap_pipeline(sc)?;
    let mut res = ExperimentResult::new("plan", provenance(sc));
    let mut t = Table::new(
        "velocity_sweep",
        &["velocity_mps", "power_W", "t_max_s", "lap_time_s", "t_star_bits", "n_lap", "energy_J", "gee", "feasible"],
    );
    for r in &out.search.sweep {
        t.push(vec![
            r.velocity,
            r.power,
            r.t_max,
            r.lap_time,
            r.t_star,
            r.n_lap as f64,
            r.energy,
            r.gee,
            if r.infeasible.is_none() { 1.0 } else { 0.0 },
        ]);
    }
    res.tables.push(t);
    res.set("n_lois", out.prepared.lois.len());
    res.set("n_irs", out.prepared.irs.len());
    res.set("n_segments", out.prepared.path.n_segments());
    res.set("path_length_m", out.prepared.path.length());
    res.set("ground_nodes", &out.prepared.gns);
    res.set("irs_modules", &out.prepared.irs);
    match &out.search.best {
        Some(plan) => {
            plan_summary(&mut res, plan);
            res.set("discharge_replay_ok", out.replay_ok);
            res.tables.push(schedule_table(plan));
        }
        None => res.set("policy", "no feasible plan"),
    }
    Ok(res)
}

pub fn run_fly_hover(sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    let p = sc.prepare()?;
    let ctx = p.context(sc)?;
    let h = fly_hover_plan(&ctx)?;
    let mut res = ExperimentResult::new("fly_hover", provenance(sc));
    let mut t = Table::new("stops", &["stop", "loi", "hover_s"]);
    for (i, (&loi, &hs)) in h.loi_order.iter().zip(&h.hover_times).enumerate() {
        t.push(vec![i as f64, loi as f64, hs]);
    }
    res.tables.push(t);
    res.set("v_max_mps", h.v_max);
    res.set("fly_time_s", h.fly_time);
    res.set("hover_time_s", h.total_hover());
    res.set("energy_J", h.energy);
    res.set("gee_bits_per_J", h.gee);
    res.set("within_endurance", h.within_endurance);
    Ok(res)
}

pub fn single_lap(sc: &Scenario) -> Result<SingleLapResult, ScenarioError> {
    let p = sc.prepare()?;
    let ctx = p.context(sc)?;
    let init = fly_hover_plan(&ctx)?;
    Ok(single_lap_solve(&ctx, &init, &sc.planner.single_lap)?)
}

pub fn run_single_lap(sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    let r = single_lap(sc)?;
    let mut res = ExperimentResult::new("single_lap", provenance(sc));
    let mut t = Table::new("trace", &["scp_iter", "dink_iter", "lambda", "numerator_bits", "denominator_J", "gee"]);
    for row in &r.trace {
        t.push(vec![row.scp_iter as f64, row.dink_iter as f64, row.lambda, row.numerator, row.denominator, row.gee]);
    }
    res.tables.push(t);
    res.tables.push(schedule_table(&r.plan));
    plan_summary(&mut res, &r.plan);
    res.set("init_gee", r.init_gee);
    res.set("scp_gee", &r.scp_gee);
    res.set("converged", r.converged);
    Ok(res)
}

/// Energy per policy across file sizes.
pub fn run_energy_comparison(sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    let prepared = sc.prepare()?;
    let ctx = prepared.context(sc)?;
    let reg = policy_registry(&sc.planner.velocities, sc.planner.early_break, sc.planner.single_lap);
    let names = ["multi-lap", "single-lap", "fly-hover"];
    let rows: Vec<Vec<f64>> = sc
        .experiments
        .file_sizes
        .par_iter()
        .map(|&q| {
            let c = ctx.with_file_size(q);
            let mut row = vec![q];
            for name in names {
                let plan = reg.get(name)?.plan(&c)?;
                row.push(plan.energy_total);
            }
            Ok(row)
        })
        .collect::<Result<_, ScenarioError>>()?;
    let mut t = Table::new("energy", &["file_bits", "multi_lap_J", "single_lap_J", "fly_hover_J"]);
    for r in rows {
        t.push(r);
    }
    let mut res = ExperimentResult::new("energy_comparison", provenance(sc));
    res.set("n_gns", prepared.gns.len());
    res.set("n_lois", prepared.lois.len());
    res.set("path_length_m", prepared.path.length());
    res.tables.push(t);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nlos_instance_faces_both_ends() {
        let sc = Scenario::default();
        for inst in random_nlos_instances(&sc, 20, 3) {
            assert!(visible(&inst.pap, &inst.irs));
            assert!(visible(&inst.gn, &inst.irs));
            let d = inst.gn.xy().dist(&inst.irs.ref_position.xy());
            assert!((d - sc.irs.placement.gn_distance).abs() < 1e-9);
        }
    }

    #[test]
    fn no_elements_is_no_irs() {
        let sc = Scenario::default();
        let c = irs_cases(&default_nlos_instance(&sc).with_elements(0), &sc).unwrap();
        for v in [c.ideal_actual, c.blind_actual, c.aware_actual, c.ideal_predicted] {
            assert!((v - c.no_irs).abs() <= 1e-12 * c.no_irs);
        }
    }

    #[test]
    fn irs_cases_ordering() {
        let sc = Scenario::default();
        let c = irs_cases(&default_nlos_instance(&sc), &sc).unwrap();
        assert!(c.ideal_predicted >= c.ideal_actual);
        assert!(c.aware_actual >= c.blind_actual);
        assert!(c.aware_actual > c.no_irs);
    }

    #[test]
    fn pack_table_shape() {
        let mut sc = Scenario::default();
        sc.experiments.pack_ratios = vec![1.0, 4.0];
        let r = run_pack_comparison(&sc).unwrap();
        let t = &r.tables[0];
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.columns.len(), 7);
        assert_eq!(t.rows[0][1], 1.0);
    }

    #[test]
    fn sizing_summary_keys() {
        let r = run_battery_sizing(&Scenario::default()).unwrap();
        for k in ["unconstrained_best_cells", "constrained_best_cells", "constrained_boundary_cells"] {
            assert!(r.summary_f64(k).is_some(), "{k}");
        }
    }
}

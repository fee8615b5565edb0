use super::BatteryModel;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    EnergyExhausted,
    CutoffVoltage,
    /// Per-cell current rose above the configured ceiling; the result is truncated.
    CurrentLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightTimeResult {
    /// Seconds.
    pub duration: f64,
    pub steps: usize,
    pub terminated_by: Termination,
    /// Per-cell energy drawn, Wh.
    pub energy_used: f64,
    /// Per-cell current at each simulated step, A.
    #[serde(skip)]
    pub currents: Vec<f64>,
    /// Terminal voltage at the start of each step, V.
    #[serde(skip)]
    pub voltages: Vec<f64>,
}

impl FlightTimeResult {
    pub fn truncated(&self) -> bool {
        self.terminated_by == Termination::CurrentLimit
    }

    pub fn minutes(&self) -> f64 {
        self.duration / 60.0
    }
}

/// Initial terminal voltage: open-circuit value at the current implied by the
/// rated voltage, refined once.
fn initial_voltage(model: &BatteryModel, p_uav: f64) -> f64 {
    let n = model.n_cells as f64;
    let i0 = p_uav / (model.v_rated * n);
    let v0 = model.f_vmax.eval(i0);
    model.f_vmax.eval(p_uav / (v0 * n))
}

fn first_current(model: &BatteryModel, p_uav: f64) -> f64 {
    p_uav / (initial_voltage(model, p_uav) * model.n_cells as f64)
}

/// Step-wise discharge simulation at constant pack power `p_uav` (W).
pub fn flight_time(model: &BatteryModel, p_uav: f64, dt: f64) -> FlightTimeResult {
    assert!(p_uav > 0.0 && dt > 0.0, "flight_time needs positive power and step");
    assert!(model.n_cells > 0, "battery has no cells");
    let n = model.n_cells as f64;
    let mut v = initial_voltage(model, p_uav);
    let mut i = p_uav / (v * n);
    let mut currents = Vec::new();
    let mut voltages = Vec::new();
    let i_rated = p_uav / (model.v_rated * n);
    if i > model.max_cell_current || i_rated > model.max_cell_current || v <= 0.0 {
        return FlightTimeResult {
            duration: 0.0,
            steps: 0,
            terminated_by: Termination::CurrentLimit,
            energy_used: 0.0,
            currents,
            voltages,
        };
    }
    let mut e = i * v * dt / 3600.0;
    let mut used = e;
    let mut steps = 1usize;
    currents.push(i);
    voltages.push(v);
    let terminated_by = loop {
        if used >= model.f_e.eval(i) {
            break Termination::EnergyExhausted;
        }
        let v_next = v - model.slope_unchecked(i) * e;
        if v_next < model.v_cutoff || v_next <= 0.0 {
            break Termination::CutoffVoltage;
        }
        let i_next = p_uav / (v_next * n);
        if i_next > model.max_cell_current {
            break Termination::CurrentLimit;
        }
        v = v_next;
        i = i_next;
        e = i * v * dt / 3600.0;
        used += e;
        steps += 1;
        currents.push(i);
        voltages.push(v);
    };
    FlightTimeResult {
        duration: steps as f64 * dt,
        steps,
        terminated_by,
        energy_used: used,
        currents,
        voltages,
    }
}

/// Capacity divided by power, ignoring voltage sag and rate effects. Seconds.
pub fn naive_flight_time(model: &BatteryModel, p_uav: f64) -> f64 {
    let i1 = first_current(model, p_uav);
    model.f_e.eval(i1) * model.n_cells as f64 * 3600.0 / p_uav
}

//! Segment energy in slack form and its linearised induced-power constraint.

use crate::power::{EnergyConstants, PowerError};

/// Exact slack: `z² = sqrt(C4 T⁴ + Δ⁴/4) − Δ²/2`.
pub fn exact_slack(c: &EnergyConstants, seg_len: f64, t: f64) -> f64 {
    let d2 = seg_len * seg_len;
    let a = c.c4 * t.powi(4);
    (a / ((a + d2 * d2 / 4.0).sqrt() + d2 / 2.0)).sqrt()
}

/// `C1 (T + 3Δ²/(T v_tip²)) + C2 Δ³/T² + C3 z`, J.
pub fn convexified_energy(c: &EnergyConstants, seg_len: f64, t: f64, z: f64) -> Result<f64, PowerError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(PowerError::Duration(t));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(PowerError::Slack(z));
    }
    let d = seg_len;
    Ok(c.c1 * (t + 3.0 * d * d / (t * c.v_tip * c.v_tip)) + c.c2 * d.powi(3) / (t * t) + c.c3 * z)
}

/// Residual of `T⁴/z² ≤ (z_ref² + 2 z_ref (z − z_ref) + Δ²)/C4`; feasible when ≤ 0.
pub fn taylor_constraint(c: &EnergyConstants, seg_len: f64, t: f64, z: f64, z_ref: f64) -> f64 {
    assert!(z_ref > 0.0, "expansion point must be positive");
    t.powi(4) / (z * z) - taylor_rhs(c, seg_len, z, z_ref)
}

pub(crate) fn taylor_rhs(c: &EnergyConstants, seg_len: f64, z: f64, z_ref: f64) -> f64 {
    (z_ref * z_ref + 2.0 * z_ref * (z - z_ref) + seg_len * seg_len) / c.c4
}

/// Residual of the exact relation `T⁴/z² ≤ (z² + Δ²)/C4`, i.e. `z` at or above the exact slack.
pub fn slack_residual(c: &EnergyConstants, seg_len: f64, t: f64, z: f64) -> f64 {
    t.powi(4) / (z * z) - (z * z + seg_len * seg_len) / c.c4
}

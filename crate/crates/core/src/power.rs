//! Rotary-wing propulsion power.

use serde::{Deserialize, Serialize};

pub const GRAVITY: f64 = 9.81;
const DENSITY_LAPSE: f64 = 2.2558e-5;
const DENSITY_EXP: f64 = 4.2577;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PowerError {
    #[error("altitude {0} m outside the density model range")]
    Altitude(f64),
    #[error("segment duration must be positive, got {0}")]
    Duration(f64),
    #[error("velocity must be non-negative, got {0}")]
    Velocity(f64),
    #[error("induced-power slack must be positive, got {0}")]
    Slack(f64),
}

/// Airframe and rotor constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UavParams {
    /// Total take-off weight, N.
    pub weight_total: f64,
    pub n_rotors: f64,
    /// Rotor blade tip speed, m/s.
    pub v_tip: f64,
    pub fuselage_area: f64,
    pub drag_coeff: f64,
    pub rotor_disc_area: f64,
    /// Blade profile drag coefficient (not the segment length).
    pub profile_drag_coeff: f64,
    pub rotor_solidity: f64,
    pub altitude: f64,
}

impl Default for UavParams {
    fn default() -> Self {
        Self {
            weight_total: 24.5,
            n_rotors: 4.0,
            v_tip: 102.0,
            fuselage_area: 0.038,
            drag_coeff: 0.9,
            rotor_disc_area: 0.06,
            profile_drag_coeff: 0.002,
            rotor_solidity: 0.05,
            altitude: 100.0,
        }
    }
}

impl UavParams {
    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight_total = weight;
        self
    }

    pub fn with_mass(self, kg: f64) -> Self {
        self.with_weight(kg * GRAVITY)
    }

    /// Relative air density at the configured altitude.
    pub fn rho(&self) -> f64 {
        air_density(self.altitude).expect("altitude validated at construction")
    }

    /// Per-rotor blade profile power at hover.
    pub fn blade_power(&self) -> f64 {
        self.profile_drag_coeff / 8.0
            * self.rho()
            * self.rotor_solidity
            * self.rotor_disc_area
            * self.v_tip.powi(3)
    }

    /// Constants of the segment-energy form `C1 (T + 3Δ²/(T v_tip²)) + C2 Δ³/T² + C3 z`
    /// with the induced-power slack `z⁴ + z²Δ² = C4 T⁴`.
    pub fn energy_constants(&self) -> EnergyConstants {
        let rho = self.rho();
        let w = self.weight_total;
        EnergyConstants {
            c1: self.n_rotors * self.blade_power(),
            c2: 0.5 * self.drag_coeff * self.fuselage_area * rho,
            c3: w,
            c4: w * w / (4.0 * self.n_rotors.powi(2) * rho * rho * self.rotor_disc_area.powi(2)),
            v_tip: self.v_tip,
        }
    }

    pub fn validate(&self) -> Result<(), PowerError> {
        air_density(self.altitude).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub v_tip: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub blade: f64,
    pub fuselage: f64,
    pub induced: f64,
    pub total: f64,
}

pub fn air_density(altitude: f64) -> Result<f64, PowerError> {
    if !(0.0..1.0 / DENSITY_LAPSE).contains(&altitude) {
        return Err(PowerError::Altitude(altitude));
    }
    Ok((1.0 - DENSITY_LAPSE * altitude).powf(DENSITY_EXP))
}

pub fn propulsion_power(params: &UavParams, v: f64) -> PowerBreakdown {
    assert!(v >= 0.0, "negative velocity {v}");
    let rho = params.rho();
    let w = params.weight_total;
    let nr = params.n_rotors;
    let blade = nr * params.blade_power() * (1.0 + 3.0 * v * v / params.v_tip.powi(2));
    let fuselage = 0.5 * params.drag_coeff * params.fuselage_area * rho * v.powi(3);
    let a = w * w / (4.0 * nr * nr * rho * rho * params.rotor_disc_area.powi(2));
    let v2 = v * v;
    // sqrt(a + v^4/4) - v^2/2 rewritten to avoid cancellation at high speed
    let inner = a / ((a + v2 * v2 / 4.0).sqrt() + v2 / 2.0);
    let induced = w * inner.sqrt();
    PowerBreakdown {
        blade,
        fuselage,
        induced,
        total: blade + fuselage + induced,
    }
}

pub fn total_power(params: &UavParams, v: f64) -> f64 {
    propulsion_power(params, v).total
}

/// Energy (J) to fly `seg_len` metres in `t` seconds at constant speed.
pub fn segment_energy(params: &UavParams, seg_len: f64, t: f64) -> Result<f64, PowerError> {
    if t <= 0.0 || !t.is_finite() {
        return Err(PowerError::Duration(t));
    }
    if seg_len < 0.0 {
        return Err(PowerError::Velocity(seg_len / t));
    }
    Ok(t * total_power(params, seg_len / t))
}

/// Speed in `[0, v_hi]` minimising total power, by golden-section search.
pub fn min_power_velocity(params: &UavParams, v_hi: f64) -> f64 {
    let f = |v: f64| total_power(params, v);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, v_hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if b - a < 1e-10 {
            break;
        }
    }
    0.5 * (a + b)
}

/// Largest speed whose power does not exceed hover power.
pub fn hover_equivalent_velocity(params: &UavParams) -> f64 {
    let hover = total_power(params, 0.0);
    let vmin = min_power_velocity(params, 60.0);
    let mut hi = vmin.max(1.0);
    while total_power(params, hi) <= hover {
        hi *= 2.0;
    }
    let mut lo = vmin;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total_power(params, mid) <= hover {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The default 0.5 m/s grid over `[0, 25]`.
pub fn velocity_grid() -> Vec<f64> {
    (0..=50).map(|i| i as f64 * 0.5).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn density_values() {
        assert_eq!(air_density(0.0).unwrap(), 1.0);
        // (1 - 0.0022558)^4.2577 via ln1p by hand: exp(4.2577 * -0.00225835) = 0.990431
        assert!((air_density(100.0).unwrap() - 0.99043).abs() < 5e-5);
        // exp(4.2577 * ln(0.977442)) = 0.907424
        assert!((air_density(1000.0).unwrap() - 0.907424).abs() < 5e-6);
        assert!(air_density(-1.0).is_err());
        assert!(air_density(5e4).is_err());
    }

    #[test]
    fn hover_breakdown() {
        let p = UavParams::default();
        let b = propulsion_power(&p, 0.0);
        // W^1.5 / sqrt(2 rho N A): 24.5^1.5 / sqrt(2*0.99043*4*0.06)
        let rho = 0.990431_f64;
        let induced = 24.5f64.powf(1.5) / (2.0 * rho * 4.0 * 0.06f64).sqrt();
        assert!((b.induced - induced).abs() < 0.01, "{}", b.induced);
        assert!((b.induced - 176.0).abs() < 1.0);
        assert!((b.blade - 3.2).abs() < 0.1);
        assert_eq!(b.fuselage, 0.0);
        assert!((b.total - b.blade - b.fuselage - b.induced).abs() < 1e-12);
    }

    #[test]
    fn interior_minimum_near_13() {
        let p = UavParams::default();
        let grid = velocity_grid();
        let (vbest, _) = grid
            .iter()
            .map(|&v| (v, total_power(&p, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(vbest > 0.0 && vbest < 25.0);
        assert!((vbest - 13.0).abs() <= 2.0, "{vbest}");
    }

    #[test]
    fn segment_energy_cases() {
        let p = UavParams::default();
        let hover = total_power(&p, 0.0);
        assert!((segment_energy(&p, 0.0, 10.0).unwrap() - 10.0 * hover).abs() < 1e-9);
        assert_eq!(segment_energy(&p, 13.0, 1.0).unwrap(), total_power(&p, 13.0));
        assert!(segment_energy(&p, 1.0, 0.0).is_err());
    }

    #[test]
    fn hover_equivalent_speed() {
        let p = UavParams::default();
        let v = hover_equivalent_velocity(&p);
        assert!((total_power(&p, v) - total_power(&p, 0.0)).abs() < 1e-6);
        assert!(v > 15.0 && v < 22.0);
    }

    proptest! {
        #[test]
        fn induced_monotone(v in 0.0f64..40.0, dv in 0.0f64..5.0) {
            let p = UavParams::default();
            prop_assert!(propulsion_power(&p, v + dv).induced <= propulsion_power(&p, v).induced + 1e-12);
        }

        #[test]
        fn total_dominates_induced(v in 0.0f64..60.0) {
            let b = propulsion_power(&UavParams::default(), v);
            prop_assert!(b.total >= b.induced);
            prop_assert!(b.blade >= 0.0 && b.fuselage >= 0.0 && b.induced >= 0.0);
        }
    }

    #[test]
    fn unbounded_growth() {
        let p = UavParams::default();
        assert!(total_power(&p, 200.0) > 10.0 * total_power(&p, 0.0));
    }
}

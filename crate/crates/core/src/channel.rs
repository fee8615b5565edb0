//! Air-to-ground path loss, LoS probability and complex link gains.

use crate::geometry::{wrap_phase, Point3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const SPEED_OF_LIGHT: f64 = 3e8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("zero transmitter-receiver distance")]
    ZeroDistance,
    #[error("transmitter must be above the ground")]
    BelowGround,
}

/// Which direction the PAP antenna main lobe points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boresight {
    /// Straight down; off-axis angle measured from the vertical.
    #[default]
    Nadir,
    /// Horizontal; off-axis angle is the elevation.
    Horizon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelParams {
    /// Hz.
    pub carrier_freq: f64,
    /// Hz per GN.
    pub bandwidth_per_gn: f64,
    pub noise_power_dbm: f64,
    pub tx_power_dbm: f64,
    pub los_a: f64,
    pub los_b: f64,
    /// dB.
    pub eta_los: f64,
    pub eta_nlos: f64,
    /// Half beamwidth, rad.
    pub beamwidth_half: f64,
    pub sidelobe_gain: f64,
    pub boresight: Boresight,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            carrier_freq: 2e9,
            bandwidth_per_gn: 20e6,
            noise_power_dbm: -101.0,
            tx_power_dbm: 23.0,
            los_a: 4.88,
            los_b: 0.43,
            eta_los: 0.2,
            eta_nlos: 24.0,
            beamwidth_half: PI / 4.0,
            sidelobe_gain: 0.1,
            boresight: Boresight::Nadir,
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl ChannelParams {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    pub fn tx_power_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }

    fn f_term_ghz(&self) -> f64 {
        20.0 * (self.carrier_freq / 1e9).log10()
    }

    /// Gain of the PAP antenna towards `rx`.
    pub fn pap_gain(&self, pap: &Point3, rx: &Point3) -> f64 {
        let d2 = pap.dist_2d(rx);
        let dz = (pap.z - rx.z).abs();
        let elevation = dz.atan2(d2);
        let off = match self.boresight {
            Boresight::Nadir => PI / 2.0 - elevation,
            Boresight::Horizon => elevation,
        };
        antenna_gain(self.beamwidth_half, 0.0, off, self.sidelobe_gain)
    }
}

/// Main-lobe gain inside the ±β cone (boundary inclusive), side-lobe gain otherwise.
pub fn antenna_gain(beamwidth_half: f64, offaxis_az: f64, offaxis_el: f64, sidelobe: f64) -> f64 {
    // small slack so angles computed to exactly β through atan2 stay inside
    let tol = 1e-12;
    if offaxis_az.abs() <= beamwidth_half + tol && offaxis_el.abs() <= beamwidth_half + tol {
        2.2846 / (beamwidth_half * beamwidth_half)
    } else {
        sidelobe
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelWarning {
    /// Altitude or IRS height outside the model's stated validity.
    OutsideValidity,
    /// Horizontal distance below the model floor; clamped.
    DistanceClamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanLoss {
    pub mean_db: f64,
    pub p_los: f64,
    pub los_db: f64,
    pub nlos_db: f64,
    pub warning: Option<ChannelWarning>,
}

fn blend(p_los: f64, los_db: f64, nlos_db: f64, warning: Option<ChannelWarning>) -> MeanLoss {
    MeanLoss {
        mean_db: p_los * los_db + (1.0 - p_los) * nlos_db,
        p_los,
        los_db,
        nlos_db,
        warning,
    }
}

/// LoS breakpoint of the PAP-IRS probability model.
pub fn pap_irs_d1(h_p: f64) -> f64 {
    (294.05 * h_p.log10() - 432.94).max(18.0)
}

pub fn pap_irs_p_los(d2d: f64, h_p: f64) -> f64 {
    let d1 = pap_irs_d1(h_p);
    if d2d <= d1 {
        return 1.0;
    }
    let p1 = 233.98 * h_p.log10() - 0.95;
    d1 / d2d + (-d2d / p1).exp() * (1.0 - d1 / d2d)
}

/// PAP to one IRS element. `h_p` is the PAP altitude.
pub fn pap_irs_loss(p: &Point3, r_elem: &Point3, h_p: f64, params: &ChannelParams) -> MeanLoss {
    let d3 = p.dist(r_elem).max(1e-9);
    let f = params.f_term_ghz();
    let lh = h_p.log10();
    let los = 30.9 + (22.25 - 0.5 * lh) * d3.log10() + f;
    let nlos = los.max(32.4 + (43.2 - 7.6 * lh) * d3.log10() + f);
    let p_los = pap_irs_p_los(p.dist_2d(r_elem), h_p);
    let valid = h_p > 22.5 && h_p <= 100.0 + 1e-9;
    blend(p_los, los, nlos, (!valid).then_some(ChannelWarning::OutsideValidity))
}

pub fn breakpoint_distance(carrier_freq: f64) -> f64 {
    18.0 * carrier_freq / SPEED_OF_LIGHT
}

pub fn irs_gn_p_los(d2d: f64) -> f64 {
    if d2d <= 18.0 {
        1.0
    } else {
        18.0 / d2d + (-d2d / 36.0).exp() * (1.0 - 18.0 / d2d)
    }
}

/// IRS element to a ground node.
pub fn irs_gn_loss(r_elem: &Point3, g: &Point3, params: &ChannelParams) -> MeanLoss {
    let mut d2 = r_elem.dist_2d(g);
    let dz = r_elem.z - g.z;
    let mut warning = None;
    if d2 < 10.0 {
        d2 = 10.0;
        warning = Some(ChannelWarning::DistanceClamped);
    } else if d2 > 5000.0 {
        warning = Some(ChannelWarning::OutsideValidity);
    }
    let d3 = d2.hypot(dz);
    let f = params.f_term_ghz();
    let d_bp = breakpoint_distance(params.carrier_freq);
    let los = if d2 <= d_bp {
        32.4 + 21.0 * d3.log10() + f
    } else {
        32.4 + 40.0 * d3.log10() + f - 9.5 * (d_bp * d_bp + 72.25).log10()
    };
    let nlos_alt = 35.3 * d3.log10() + 22.4 + 21.3 * (params.carrier_freq / 1e9).log10();
    let nlos = los.max(nlos_alt);
    blend(irs_gn_p_los(d2), los, nlos, warning)
}

/// Elevation of `p` seen from `g`, degrees.
pub fn elevation_deg(p: &Point3, g: &Point3) -> f64 {
    (p.z - g.z).atan2(p.dist_2d(g)).to_degrees()
}

pub fn pap_gn_p_los(elevation_deg: f64, a: f64, b: f64) -> f64 {
    1.0 / (1.0 + a * (-b * (elevation_deg - a)).exp())
}

pub fn free_space_loss_db(d3: f64, carrier_freq: f64) -> f64 {
    20.0 * d3.log10() + 20.0 * carrier_freq.log10() + 20.0 * (4.0 * PI / SPEED_OF_LIGHT).log10()
}

/// PAP to a ground node, probabilistic LoS/NLoS with excess losses.
pub fn pap_gn_loss(p: &Point3, g: &Point3, params: &ChannelParams) -> Result<MeanLoss, ChannelError> {
    if p.z <= g.z {
        return Err(ChannelError::BelowGround);
    }
    let d3 = p.dist(g);
    if d3 <= 0.0 {
        return Err(ChannelError::ZeroDistance);
    }
    let fspl = free_space_loss_db(d3, params.carrier_freq);
    let p_los = pap_gn_p_los(elevation_deg(p, g), params.los_a, params.los_b);
    Ok(blend(p_los, fspl + params.eta_los, fspl + params.eta_nlos, None))
}

/// `vis·sqrt(G·10^(-L/10))·exp(-j2πd/λ)`
pub fn complex_channel(loss_db: f64, gain: f64, d3: f64, wavelength: f64, visible: bool) -> Complex64 {
    assert!(wavelength > 0.0);
    if !visible {
        return Complex64::new(0.0, 0.0);
    }
    let mag = (gain * 10f64.powf(-loss_db / 10.0)).sqrt();
    let phase = wrap_phase(-2.0 * PI * (d3 / wavelength).fract());
    Complex64::from_polar(mag, phase)
}

pub fn magnitude_phase(h: Complex64) -> (f64, f64) {
    (h.norm(), wrap_phase(h.arg()))
}

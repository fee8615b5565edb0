//! Reflecting-surface geometry, amplitude-phase coupling and received SNR.

mod ao;
mod strategy;

pub use ao::{alternate_optimize, AoResult};
pub use strategy::{phase_registry, BeamformResult, PhaseStrategy};

use crate::channel::{complex_channel, irs_gn_loss, pap_gn_loss, pap_irs_loss, ChannelError, ChannelParams};
use crate::geometry::{Point2, Point3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IrsError {
    #[error("IRS {irs}: {got} reflection coefficients for {expected} elements")]
    LengthMismatch { irs: usize, expected: usize, got: usize },
    #[error("{configs} reflection configs for {cascades} IRS cascades")]
    CountMismatch { configs: usize, cascades: usize },
    #[error("phase set is empty")]
    EmptyPhaseSet,
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// A vertical uniform linear array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrsModule {
    /// Centre of the first (top) element.
    pub ref_position: Point3,
    pub n_elements: usize,
    pub elem_dx: f64,
    pub elem_dz: f64,
    /// Direction the reflecting face points to, rad from +x.
    pub normal_azimuth: f64,
}

impl IrsModule {
    pub fn element(&self, k: usize) -> Point3 {
        let r = self.ref_position;
        Point3::new(r.x, r.y, r.z - k as f64 * self.elem_dz)
    }

    pub fn elements(&self) -> impl Iterator<Item = Point3> + '_ {
        (0..self.n_elements).map(|k| self.element(k))
    }

    pub fn normal(&self) -> Point2 {
        Point2::new(self.normal_azimuth.cos(), self.normal_azimuth.sin())
    }

    pub fn area(&self) -> f64 {
        self.n_elements as f64 * self.elem_dx * self.elem_dz
    }
}

/// Strictly in front of the reflecting face (XY half-plane test).
pub fn visible(observer: &Point3, irs: &IrsModule) -> bool {
    let off = observer.xy().sub(&irs.ref_position.xy());
    if off.norm() == 0.0 {
        return false;
    }
    off.dot(&irs.normal()) > 1e-12 * off.norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AmpPhaseParams {
    pub mu_min: f64,
    pub varrho: f64,
    pub zeta: f64,
}

impl Default for AmpPhaseParams {
    fn default() -> Self {
        Self {
            mu_min: 0.2,
            varrho: 0.43 * PI,
            zeta: 1.6,
        }
    }
}

pub fn amp_response(theta: f64, p: &AmpPhaseParams) -> f64 {
    let s = ((theta - p.varrho).sin() + 1.0) / 2.0;
    (1.0 - p.mu_min) * s.max(0.0).powf(p.zeta) + p.mu_min
}

pub fn default_phase_set() -> Vec<f64> {
    vec![0.0, PI / 2.0, -PI / 2.0, PI]
}

/// Per-element phases with their coupled amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionConfig {
    pub phases: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl ReflectionConfig {
    pub fn coupled(phases: Vec<f64>, p: &AmpPhaseParams) -> Self {
        let amplitudes = phases.iter().map(|&t| amp_response(t, p)).collect();
        Self { phases, amplitudes }
    }

    /// Unit amplitudes; only used for what-if predictions.
    pub fn ideal(phases: Vec<f64>) -> Self {
        let amplitudes = vec![1.0; phases.len()];
        Self { phases, amplitudes }
    }
}

/// `(h_pr[k], h_rg[k])` for every element of one IRS.
pub type Cascade = Vec<(Complex64, Complex64)>;

/// Effective per-element coefficient `conj(h_rg)·h_pr`.
pub(crate) fn cascade_coeff(pair: &(Complex64, Complex64)) -> Complex64 {
    pair.1.conj() * pair.0
}

pub fn combined_channel(
    direct: Complex64,
    cascades: &[Cascade],
    configs: &[ReflectionConfig],
) -> Result<Complex64, IrsError> {
    if configs.len() != cascades.len() {
        return Err(IrsError::CountMismatch {
            configs: configs.len(),
            cascades: cascades.len(),
        });
    }
    let mut sum = direct;
    for (i, (cas, cfg)) in cascades.iter().zip(configs).enumerate() {
        if cfg.phases.len() != cas.len() || cfg.amplitudes.len() != cas.len() {
            return Err(IrsError::LengthMismatch {
                irs: i,
                expected: cas.len(),
                got: cfg.phases.len().min(cfg.amplitudes.len()),
            });
        }
        for (pair, (&th, &mu)) in cas.iter().zip(cfg.phases.iter().zip(&cfg.amplitudes)) {
            sum += cascade_coeff(pair) * Complex64::from_polar(mu, th);
        }
    }
    Ok(sum)
}

pub fn received_snr(
    direct: Complex64,
    cascades: &[Cascade],
    configs: &[ReflectionConfig],
    tx_power: f64,
    noise: f64,
) -> Result<f64, IrsError> {
    Ok(tx_power * combined_channel(direct, cascades, configs)?.norm_sqr() / noise)
}

/// Shannon rate, bits/s.
pub fn rate(snr: f64, bandwidth: f64) -> f64 {
    assert!(snr >= 0.0, "negative SNR");
    bandwidth * (1.0 + snr).log2()
}

/// Direct PAP to GN channel.
pub fn direct_channel(pap: &Point3, gn: &Point3, ch: &ChannelParams) -> Result<Complex64, IrsError> {
    let l = pap_gn_loss(pap, gn, ch)?;
    Ok(complex_channel(l.mean_db, ch.pap_gain(pap, gn), pap.dist(gn), ch.wavelength(), true))
}

/// Element-wise PAP→IRS and IRS→GN channels, both gated by visibility.
pub fn cascade_channel(pap: &Point3, irs: &IrsModule, gn: &Point3, ch: &ChannelParams) -> Cascade {
    let b_pr = visible(pap, irs);
    let b_rg = visible(gn, irs);
    let lam = ch.wavelength();
    irs.elements()
        .map(|e| {
            let lpr = pap_irs_loss(pap, &e, pap.z, ch);
            let h_pr = complex_channel(lpr.mean_db, ch.pap_gain(pap, &e), pap.dist(&e), lam, b_pr);
            let lrg = irs_gn_loss(&e, gn, ch);
            let h_rg = complex_channel(lrg.mean_db, 1.0, e.dist(gn), lam, b_rg);
            (h_pr, h_rg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn irs() -> IrsModule {
        IrsModule {
            ref_position: Point3::new(0.0, 0.0, 10.0),
            n_elements: 4,
            elem_dx: 0.075,
            elem_dz: 0.075,
            normal_azimuth: 0.0,
        }
    }

    #[test]
    fn visibility_half_plane() {
        let s = irs();
        assert!(visible(&Point3::ground(5.0, 0.0), &s));
        assert!(!visible(&Point3::ground(-5.0, 0.0), &s));
        assert!(!visible(&Point3::ground(0.0, 5.0), &s));
        assert!(!visible(&Point3::new(0.0, 0.0, 100.0), &s));
    }

    #[test]
    fn element_layout() {
        let s = irs();
        assert_eq!(s.element(0), s.ref_position);
        assert!((s.element(3).z - (10.0 - 3.0 * 0.075)).abs() < 1e-12);
    }

    #[test]
    fn amplitude_cases() {
        let p = AmpPhaseParams::default();
        let flat = AmpPhaseParams { zeta: 0.0, ..p };
        for t in [-3.0, -1.0, 0.0, 2.0] {
            assert!((amp_response(t, &flat) - 1.0).abs() < 1e-12);
        }
        assert!((amp_response(p.varrho + PI / 2.0, &p) - 1.0).abs() < 1e-12);
        assert!((amp_response(p.varrho - PI / 2.0, &p) - p.mu_min).abs() < 1e-12);
    }

    #[test]
    fn snr_cases() {
        let d = c(0.3, -0.1);
        assert!((received_snr(d, &[], &[], 2.0, 0.5).unwrap() - 2.0 * d.norm_sqr() / 0.5).abs() < 1e-12);
        let cas = vec![vec![(c(0.2, 0.1), c(-0.4, 0.3))]];
        let expect = 0.05 * 0.25;
        for th in [0.0, 1.0, -2.5] {
            let cfg = vec![ReflectionConfig::ideal(vec![th])];
            assert!((received_snr(c(0.0, 0.0), &cas, &cfg, 1.0, 1.0).unwrap() - expect).abs() < 1e-12);
        }
        // equal magnitudes, opposite phases
        let cas = vec![vec![(c(1.0, 0.0), c(1.0, 0.0)), (c(1.0, 0.0), c(1.0, 0.0))]];
        let cfg = vec![ReflectionConfig::ideal(vec![0.0, PI])];
        assert!(received_snr(c(0.0, 0.0), &cas, &cfg, 1.0, 1.0).unwrap() < 1e-24);
        let bad = vec![ReflectionConfig::ideal(vec![0.0])];
        assert!(matches!(
            received_snr(c(0.0, 0.0), &cas, &bad, 1.0, 1.0),
            Err(IrsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn rate_cases() {
        assert_eq!(rate(0.0, 20e6), 0.0);
        assert_eq!(rate(1.0, 20e6), 20e6);
        assert_eq!(rate(3.0, 20e6), 40e6);
    }

    #[test]
    fn hidden_irs_contributes_nothing() {
        let ch = ChannelParams::default();
        let s = irs();
        let pap = Point3::new(50.0, 0.0, 100.0);
        let gn_back = Point3::ground(-20.0, 0.0);
        assert!(cascade_channel(&pap, &s, &gn_back, &ch).iter().all(|(_, rg)| rg.norm() == 0.0));
    }

    proptest! {
        #[test]
        fn amp_in_range(t in -10.0f64..10.0) {
            let p = AmpPhaseParams::default();
            let a = amp_response(t, &p);
            prop_assert!(a >= p.mu_min - 1e-12 && a <= 1.0 + 1e-12);
        }

        #[test]
        fn relabel_invariant(v in proptest::collection::vec(-1.0f64..1.0, 8), th in proptest::collection::vec(-3.0f64..3.0, 4)) {
            let a: Cascade = vec![(c(v[0], v[1]), c(v[2], v[3])), (c(v[4], v[5]), c(v[6], v[7]))];
            let b: Cascade = vec![(c(v[7], v[0]), c(v[1], v[6]))];
            let p = AmpPhaseParams::default();
            let ca = ReflectionConfig::coupled(th[..2].to_vec(), &p);
            let cb = ReflectionConfig::coupled(th[2..3].to_vec(), &p);
            let d = c(v[3], v[4]);
            let s1 = received_snr(d, &[a.clone(), b.clone()], &[ca.clone(), cb.clone()], 1.0, 1.0).unwrap();
            let s2 = received_snr(d, &[b, a], &[cb, ca], 1.0, 1.0).unwrap();
            prop_assert!((s1 - s2).abs() <= 1e-12 * s1.max(1.0));
        }
    }
}

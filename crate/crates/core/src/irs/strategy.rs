use super::{alternate_optimize, cascade_coeff, combined_channel, AmpPhaseParams, Cascade, IrsError, ReflectionConfig};
use crate::geometry::wrap_phase;
use crate::registry::{Named, Registry};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformResult {
    /// One config per IRS; empty when the strategy ignores the surfaces.
    pub configs: Vec<ReflectionConfig>,
    /// SNR the scheduler would assume.
    pub predicted_snr: f64,
    /// SNR with the true coupled amplitudes.
    pub actual_snr: f64,
}

pub trait PhaseStrategy: Named + Send + Sync {
    fn configure(
        &self,
        direct: Complex64,
        cascades: &[Cascade],
        amp: &AmpPhaseParams,
        snr_scale: f64,
    ) -> Result<BeamformResult, IrsError>;
}

/// Direct link only.
pub struct NoIrs;

/// Every element rotated to align with the direct path, any phase allowed.
pub struct ContinuousIdeal;

pub struct DiscreteBlind {
    pub phase_set: Vec<f64>,
}

pub struct DiscreteAware {
    pub phase_set: Vec<f64>,
}

impl Named for NoIrs {
    fn name(&self) -> &'static str {
        "none"
    }
}
impl Named for ContinuousIdeal {
    fn name(&self) -> &'static str {
        "continuous-ideal"
    }
}
impl Named for DiscreteBlind {
    fn name(&self) -> &'static str {
        "discrete-blind"
    }
}
impl Named for DiscreteAware {
    fn name(&self) -> &'static str {
        "discrete-aware"
    }
}

impl PhaseStrategy for NoIrs {
    fn configure(&self, direct: Complex64, _: &[Cascade], _: &AmpPhaseParams, s: f64) -> Result<BeamformResult, IrsError> {
        let v = s * direct.norm_sqr();
        Ok(BeamformResult { configs: Vec::new(), predicted_snr: v, actual_snr: v })
    }
}

impl PhaseStrategy for ContinuousIdeal {
    fn configure(
        &self,
        direct: Complex64,
        cascades: &[Cascade],
        amp: &AmpPhaseParams,
        s: f64,
    ) -> Result<BeamformResult, IrsError> {
        // reference phase: the direct path, else the strongest reflected term
        let reference = if direct.norm() > 0.0 {
            direct.arg()
        } else {
            cascades
                .iter()
                .flatten()
                .map(cascade_coeff)
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .map_or(0.0, |c| c.arg())
        };
        let phases: Vec<Vec<f64>> = cascades
            .iter()
            .map(|cas| cas.iter().map(|p| wrap_phase(reference - cascade_coeff(p).arg())).collect())
            .collect();
        let ideal: Vec<_> = phases.iter().cloned().map(ReflectionConfig::ideal).collect();
        let configs: Vec<_> = phases.into_iter().map(|p| ReflectionConfig::coupled(p, amp)).collect();
        Ok(BeamformResult {
            predicted_snr: s * combined_channel(direct, cascades, &ideal)?.norm_sqr(),
            actual_snr: s * combined_channel(direct, cascades, &configs)?.norm_sqr(),
            configs,
        })
    }
}

fn discrete(
    set: &[f64],
    aware: bool,
    direct: Complex64,
    cascades: &[Cascade],
    amp: &AmpPhaseParams,
    s: f64,
) -> Result<BeamformResult, IrsError> {
    let r = alternate_optimize(direct, cascades, set, amp, aware, s)?;
    Ok(BeamformResult { configs: r.configs, predicted_snr: r.predicted_snr, actual_snr: r.snr })
}

impl PhaseStrategy for DiscreteBlind {
    fn configure(&self, d: Complex64, c: &[Cascade], a: &AmpPhaseParams, s: f64) -> Result<BeamformResult, IrsError> {
        discrete(&self.phase_set, false, d, c, a, s)
    }
}

impl PhaseStrategy for DiscreteAware {
    fn configure(&self, d: Complex64, c: &[Cascade], a: &AmpPhaseParams, s: f64) -> Result<BeamformResult, IrsError> {
        discrete(&self.phase_set, true, d, c, a, s)
    }
}

pub fn phase_registry(phase_set: &[f64]) -> Registry<dyn PhaseStrategy> {
    let mut r: Registry<dyn PhaseStrategy> = Registry::new("phase strategy");
    r.register(Box::new(NoIrs))
        .register(Box::new(ContinuousIdeal))
        .register(Box::new(DiscreteBlind { phase_set: phase_set.to_vec() }))
        .register(Box::new(DiscreteAware { phase_set: phase_set.to_vec() }));
    r
}

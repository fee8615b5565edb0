use crate::channel::ChannelParams;
use crate::geometry::Point3;
use crate::irs::{cascade_channel, direct_channel, rate, visible, AmpPhaseParams, IrsError, IrsModule, PhaseStrategy, ReflectionConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Achievable rate per (segment, GN), bits/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub d: Vec<Vec<f64>>,
}

impl RateTable {
    pub fn new(d: Vec<Vec<f64>>) -> Self {
        assert!(d.iter().flatten().all(|&v| v >= 0.0 && v.is_finite()), "rates must be finite and non-negative");
        Self { d }
    }

    pub fn segments(&self) -> usize {
        self.d.len()
    }

    pub fn gns(&self) -> usize {
        self.d.first().map_or(0, |r| r.len())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.d.iter().map(|r| r.iter().map(|v| v * c).collect()).collect())
    }

    pub fn max(&self) -> f64 {
        self.d.iter().flatten().cloned().fold(0.0, f64::max)
    }
}

/// Beamforming outcome for one (segment, GN) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Indices of IRSs in front of both ends.
    pub irs: Vec<usize>,
    pub configs: Vec<ReflectionConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformedRates {
    pub actual: RateTable,
    /// Rates the phase strategy believes it achieves.
    pub predicted: RateTable,
    /// `links[m][n]`.
    pub links: Vec<Vec<LinkConfig>>,
}

/// Beamform every (segment, GN) pair and evaluate the rates.
pub fn compute_rates(
    points: &[Point3],
    gns: &[Point3],
    irs: &[IrsModule],
    channel: &ChannelParams,
    amp: &AmpPhaseParams,
    strategy: &dyn PhaseStrategy,
) -> Result<BeamformedRates, IrsError> {
    let scale = channel.tx_power_w() / channel.noise_power_w();
    let bw = channel.bandwidth_per_gn;
    let rows: Vec<Vec<(f64, f64, LinkConfig)>> = points
        .par_iter()
        .map(|p| {
            gns.iter()
                .map(|g| {
                    let direct = direct_channel(p, g, channel)?;
                    let idx: Vec<usize> = (0..irs.len())
                        .filter(|&i| visible(p, &irs[i]) && visible(g, &irs[i]))
                        .collect();
                    let cascades: Vec<_> = idx.iter().map(|&i| cascade_channel(p, &irs[i], g, channel)).collect();
                    let r = strategy.configure(direct, &cascades, amp, scale)?;
                    Ok((rate(r.actual_snr, bw), rate(r.predicted_snr, bw), LinkConfig { irs: idx, configs: r.configs }))
                })
                .collect::<Result<Vec<_>, IrsError>>()
        })
        .collect::<Result<_, _>>()?;
    let actual = RateTable::new(rows.iter().map(|r| r.iter().map(|x| x.0).collect()).collect());
    let predicted = RateTable::new(rows.iter().map(|r| r.iter().map(|x| x.1).collect()).collect());
    let links = rows.into_iter().map(|r| r.into_iter().map(|x| x.2).collect()).collect();
    Ok(BeamformedRates { actual, predicted, links })
}

//! Scenario configuration and the shared setup pipeline (GNs, cover, LoIs,
//! IRS placement, path, rates).

use crate::baseline::SingleLapConfig;
use crate::battery::{fit_battery, load_datasheet, parse_datasheet, BatteryError, BatteryModel, FitConfig, DEFAULT_DATASHEET};
use crate::channel::ChannelParams;
use crate::coverage::{
    build_path, packing_registry, place_irs, select_lois, CoverSet, CoverageError, FlightPath, Loi, LoiRule,
    PlacementConfig,
};
use crate::geometry::{Point2, Point3};
use crate::irs::{phase_registry, AmpPhaseParams, IrsError, IrsModule};
use crate::lp::LpError;
use crate::planner::{compute_rates, default_velocity_set, BeamformedRates, PlanningContext};
use crate::power::{PowerError, UavParams};
use crate::registry::UnknownStrategy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 15;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("reading scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("serialising scenario: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Battery(#[from] BatteryError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
    #[error(transparent)]
    Irs(#[from] IrsError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error(transparent)]
    Strategy(#[from] UnknownStrategy),
    #[error(transparent)]
    Baseline(#[from] crate::baseline::BaselineError),
    #[error(transparent)]
    Policy(#[from] crate::policy::PolicyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AreaConfig {
    /// Radius of the served region, m.
    pub radius: f64,
    /// GNs drawn uniformly in the disc when no explicit positions are given.
    pub n_gns: usize,
    pub gn_positions: Option<Vec<Point3>>,
}

impl Default for AreaConfig {
    fn default() -> Self {
        Self { radius: 60.0, n_gns: 6, gn_positions: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    /// CSV datasheet; the bundled one when absent.
    pub datasheet: Option<PathBuf>,
    pub fit: FitConfig,
    /// Discharge simulation step, s.
    pub dt: f64,
    /// Airframe mass without battery, kg (pack sizing).
    pub body_mass: f64,
    pub max_takeoff_mass: f64,
    pub sizing_min_cells: usize,
    pub sizing_max_cells: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            datasheet: None,
            fit: FitConfig::default(),
            dt: 1.0,
            body_mass: 2.0,
            max_takeoff_mass: 3.6,
            sizing_min_cells: 1,
            sizing_max_cells: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrsConfig {
    pub enabled: bool,
    pub amplitude: AmpPhaseParams,
    /// Available phase shifts, degrees.
    pub phase_set_deg: Vec<f64>,
    /// Phase strategy name.
    pub strategy: String,
    pub placement: PlacementConfig,
}

impl Default for IrsConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            amplitude: AmpPhaseParams::default(),
            phase_set_deg: vec![0.0, 90.0, -90.0, 180.0],
            strategy: "discrete-aware".into(),
            placement: PlacementConfig::default(),
        }
    }
}

impl IrsConfig {
    pub fn phase_set(&self) -> Vec<f64> {
        self.phase_set_deg.iter().map(|d| d * PI / 180.0).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverageConfig {
    /// LoS coverage radius around a LoI, m.
    pub r_small: f64,
    pub packing: String,
    pub loi_rule: LoiRule,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        Self { r_small: 20.0, packing: "multi-tier".into(), loi_rule: LoiRule::GreedyCover }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Candidate speeds, m/s.
    pub velocities: Vec<f64>,
    /// Path discretisation, m.
    pub delta: f64,
    pub early_break: bool,
    pub single_lap: SingleLapConfig,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { velocities: default_velocity_set(), delta: 1.0, early_break: false, single_lap: SingleLapConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Flight-time sweep speeds, m/s.
    pub flight_velocities: Vec<f64>,
    /// File sizes for the policy comparison, bits.
    pub file_sizes: Vec<f64>,
    /// Element counts for the IRS sweep.
    pub irs_elements: Vec<usize>,
    /// Horizontal PAP to GN distance in the IRS sweep, m.
    pub irs_sweep_distance: f64,
    /// Treat the direct PAP to GN link of the IRS sweep as obstructed.
    pub irs_sweep_blocked_direct: bool,
    pub pack_ratios: Vec<f64>,
    pub pack_r_small: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            flight_velocities: (0..=50).map(|i| i as f64 * 0.5).collect(),
            file_sizes: vec![2e9, 4e9, 8e9, 16e9],
            irs_elements: (0..=10).map(|i| i * 10).collect(),
            irs_sweep_distance: 200.0,
            irs_sweep_blocked_direct: true,
            pack_ratios: (1..=10).map(f64::from).collect(),
            pack_r_small: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    /// File size per GN, bits.
    pub q_bits: f64,
    pub p_initial: Point3,
    pub p_final: Point3,
    pub area: AreaConfig,
    pub uav: UavParams,
    pub battery: BatteryConfig,
    pub channel: ChannelParams,
    pub irs: IrsConfig,
    pub coverage: CoverageConfig,
    pub planner: PlannerConfig,
    pub experiments: ExperimentConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            q_bits: 2e9,
            p_initial: Point3::new(0.0, 0.0, 100.0),
            p_final: Point3::new(0.0, 0.0, 100.0),
            area: AreaConfig::default(),
            uav: UavParams::default(),
            battery: BatteryConfig::default(),
            channel: ChannelParams::default(),
            irs: IrsConfig::default(),
            coverage: CoverageConfig::default(),
            planner: PlannerConfig::default(),
            experiments: ExperimentConfig::default(),
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = toml::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let mut s = Self::from_toml(&std::fs::read_to_string(path)?)?;
        // datasheet paths are relative to the scenario file
        if let (Some(ds), Some(dir)) = (&s.battery.datasheet, path.parent()) {
            if ds.is_relative() {
                s.battery.datasheet = Some(dir.join(ds));
            }
        }
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        Ok(toml::to_string(self)?)
    }

    /// SHA-256 of the canonical serialisation.
    pub fn hash(&self) -> String {
        let text = self.to_toml().unwrap_or_default();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Invalid(m));
        if !(self.q_bits > 0.0) {
            return bad(format!("file size must be positive, got {}", self.q_bits));
        }
        if !(self.area.radius > 0.0) {
            return bad("area radius must be positive".into());
        }
        if let Some(gns) = &self.area.gn_positions {
            for g in gns {
                if g.z != 0.0 || g.xy().norm() > self.area.radius * (1.0 + 1e-12) {
                    return bad(format!("ground node {g:?} outside the area"));
                }
            }
        }
        let h = self.uav.altitude;
        if !(self.planner.delta > 0.0) || self.planner.delta > 0.1 * h {
            return bad(format!("segment length {} must be positive and well below the altitude", self.planner.delta));
        }
        if self.planner.velocities.is_empty() || self.planner.velocities.iter().any(|v| !(*v > 0.0)) {
            return bad("velocity set must be non-empty and positive".into());
        }
        if !(self.coverage.r_small > 0.0) {
            return bad("coverage radius must be positive".into());
        }
        if self.battery.fit.n_cells == 0 {
            return bad("battery needs at least one cell".into());
        }
        self.uav.validate()?;
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn ground_nodes(&self) -> Vec<Point3> {
        if let Some(g) = &self.area.gn_positions {
            return g.clone();
        }
        uniform_disc(self.area.n_gns, self.area.radius, self.seed)
    }

    /// Fitted cell model with the configured pack.
    pub fn battery_model(&self) -> Result<BatteryModel, ScenarioError> {
        let pts = match &self.battery.datasheet {
            Some(p) => load_datasheet(p)?,
            None => parse_datasheet(DEFAULT_DATASHEET)?,
        };
        Ok(fit_battery(&pts, &self.battery.fit)?)
    }

    /// Run the geometric and radio pipeline up to the rate table.
    pub fn prepare(&self) -> Result<Prepared, ScenarioError> {
        self.validate()?;
        let gns = self.ground_nodes();
        let packers = packing_registry();
        let cover = packers.get(&self.coverage.packing)?.pack(self.area.radius, self.coverage.r_small);
        let lois = select_lois(&cover, &gns, self.coverage.loi_rule)?;
        let irs = if self.irs.enabled { place_irs(&lois, &gns, &self.irs.placement) } else { Vec::new() };
        let centers: Vec<Point2> = lois.iter().map(|l| l.center).collect();
        let path = build_path(&centers, self.p_initial, self.p_final, self.planner.delta, self.uav.altitude);
        let phases = phase_registry(&self.irs.phase_set());
        let strategy = phases.get(&self.irs.strategy)?;
        let rates =
            compute_rates(path.segment_points(), &gns, &irs, &self.channel, &self.irs.amplitude, strategy)?;
        Ok(Prepared { gns, cover, lois, irs, path, rates, battery: self.battery_model()? })
    }
}

/// `n` ground points uniform over a disc of radius `r`.
pub fn uniform_disc(n: usize, r: f64, seed: u64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let rad = r * rng.gen::<f64>().sqrt();
            let th = 2.0 * PI * rng.gen::<f64>();
            Point3::ground(rad * th.cos(), rad * th.sin())
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub gns: Vec<Point3>,
    pub cover: CoverSet,
    pub lois: Vec<Loi>,
    pub irs: Vec<IrsModule>,
    pub path: FlightPath,
    pub rates: BeamformedRates,
    pub battery: BatteryModel,
}

impl Prepared {
    pub fn context(&self, sc: &Scenario) -> Result<PlanningContext, ScenarioError> {
        Ok(PlanningContext::new(
            self.path.clone(),
            self.rates.actual.clone(),
            sc.uav,
            self.battery.clone(),
            sc.q_bits,
            sc.battery.dt,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Scenario::from_toml("").unwrap(), Scenario::default());
    }

    #[test]
    fn round_trip() {
        let mut s = Scenario::default();
        s.area.gn_positions = Some(vec![Point3::ground(1.0, 2.0), Point3::ground(-3.5, 0.25)]);
        s.irs.strategy = "discrete-blind".into();
        s.planner.early_break = true;
        let text = s.to_toml().unwrap();
        let back = Scenario::from_toml(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_toml().unwrap(), text);
        assert_eq!(back.hash(), s.hash());
    }

    #[test]
    fn partial_override() {
        let s = Scenario::from_toml("q_bits = 4e9\n[uav]\naltitude = 120.0\n[planner]\nvelocities = [5.0, 10.0]\n")
            .unwrap();
        assert_eq!(s.q_bits, 4e9);
        assert_eq!(s.uav.altitude, 120.0);
        assert_eq!(s.uav.weight_total, UavParams::default().weight_total);
        assert_eq!(s.planner.velocities, vec![5.0, 10.0]);
    }

    #[test]
    fn rejects_invalid() {
        assert!(Scenario::from_toml("q_bits = 0.0").is_err());
        assert!(Scenario::from_toml("[planner]\ndelta = 50.0").is_err());
        assert!(Scenario::from_toml("[area]\nradius = 10.0\ngn_positions = [{x = 20.0, y = 0.0, z = 0.0}]").is_err());
        assert!(Scenario::from_toml("unknown_key = 1").is_err());
    }

    #[test]
    fn gns_inside_and_seeded() {
        let s = Scenario::default();
        let a = s.ground_nodes();
        assert_eq!(a.len(), 6);
        assert!(a.iter().all(|g| g.xy().norm() <= 60.0 && g.z == 0.0));
        assert_eq!(a, s.ground_nodes());
        assert_ne!(a, s.clone().with_seed(8).ground_nodes());
    }

    #[test]
    fn seed_changes_hash() {
        assert_ne!(Scenario::default().hash(), Scenario::default().with_seed(1).hash());
    }
}

//! Li-ion discharge regression and Peukert-aware endurance.

mod discharge;
mod fit;
mod sizing;

pub use discharge::{flight_time, naive_flight_time, FlightTimeResult, Termination};
pub use fit::{fit_battery, r_squared, FitConfig, Linear, Quadratic, Rational};
pub use sizing::{sizing_sweep, SizingRow};

use serde::{Deserialize, Serialize};
use std::path::Path;

/// Shipped sample datasheet for an 18650 high-capacity cell.
pub const DEFAULT_DATASHEET: &str = include_str!("../../data/lg_mh1.csv");

#[derive(Debug, thiserror::Error)]
pub enum BatteryError {
    #[error("need at least {needed} distinct currents, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("singular normal equations in {0} fit")]
    Singular(&'static str),
    #[error("current {current} A outside usable range [{lo}, {hi}] A")]
    CurrentOutOfRange { current: f64, lo: f64, hi: f64 },
    #[error("invalid datasheet row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error("battery needs at least one cell")]
    NoCells,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DischargeCurvePoint {
    #[serde(rename = "current_A")]
    pub current: f64,
    #[serde(rename = "v_max_V")]
    pub v_max: f64,
    #[serde(rename = "v_min_V")]
    pub v_min: f64,
    #[serde(rename = "e_max_Wh")]
    pub e_max: f64,
}

impl DischargeCurvePoint {
    fn check(&self, row: usize) -> Result<(), BatteryError> {
        let bad = |reason: &str| BatteryError::BadRow {
            row,
            reason: reason.to_string(),
        };
        if !(self.current > 0.0) {
            return Err(bad("current must be positive"));
        }
        if !(self.v_max > self.v_min && self.v_min > 0.0) {
            return Err(bad("need v_max > v_min > 0"));
        }
        if !(self.e_max > 0.0) {
            return Err(bad("e_max must be positive"));
        }
        Ok(())
    }
}

pub fn parse_datasheet(text: &str) -> Result<Vec<DischargeCurvePoint>, BatteryError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize().enumerate() {
        let p: DischargeCurvePoint = rec?;
        p.check(i + 1)?;
        out.push(p);
    }
    Ok(out)
}

pub fn load_datasheet(path: &Path) -> Result<Vec<DischargeCurvePoint>, BatteryError> {
    parse_datasheet(&std::fs::read_to_string(path)?)
}

/// Fitted cell model plus pack configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryModel {
    pub f_vmax: Linear,
    pub f_vmin: Quadratic,
    pub f_e: Rational,
    pub n_cells: usize,
    /// kg per cell.
    pub cell_weight: f64,
    pub v_cutoff: f64,
    pub v_rated: f64,
    /// R² of the v_max, v_min and capacity fits.
    pub fit_r2: [f64; 3],
    /// Range of currents seen by the fit, A.
    pub current_range: (f64, f64),
    pub extrapolation_margin: f64,
    /// Per-cell current ceiling, A.
    pub max_cell_current: f64,
}

impl BatteryModel {
    pub fn with_cells(mut self, n: usize) -> Self {
        self.n_cells = n;
        self
    }

    pub fn with_cutoff(mut self, v: f64) -> Self {
        self.v_cutoff = v;
        self
    }

    pub fn pack_mass(&self) -> f64 {
        self.n_cells as f64 * self.cell_weight
    }

    fn usable_range(&self) -> (f64, f64) {
        let (lo, hi) = self.current_range;
        ((lo - self.extrapolation_margin).max(0.0), hi + self.extrapolation_margin)
    }

    /// Voltage drop per Wh drawn at the given per-cell current.
    pub fn slope(&self, current: f64) -> Result<f64, BatteryError> {
        let (lo, hi) = self.usable_range();
        if !(lo..=hi).contains(&current) {
            return Err(BatteryError::CurrentOutOfRange { current, lo, hi });
        }
        Ok(self.slope_unchecked(current))
    }

    pub(crate) fn slope_unchecked(&self, current: f64) -> f64 {
        (self.f_vmax.eval(current) - self.f_vmin.eval(current)) / self.f_e.eval(current)
    }

    /// Fit the shipped datasheet with default pack settings.
    pub fn default_fitted() -> Self {
        let pts = parse_datasheet(DEFAULT_DATASHEET).expect("shipped datasheet parses");
        fit_battery(&pts, &FitConfig::default()).expect("shipped datasheet fits")
    }
}

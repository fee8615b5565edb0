use super::{flight_time, BatteryError, BatteryModel};
use crate::power::{total_power, UavParams, GRAVITY};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingRow {
    pub n_cells: usize,
    pub hover_minutes: f64,
    /// Take-off mass exceeds the limit.
    pub constrained: bool,
    pub truncated: bool,
}

/// Hover endurance against pack size. `body_weight` in N, masses in kg.
pub fn sizing_sweep(
    body_weight: f64,
    cell_weight: f64,
    n_range: impl IntoIterator<Item = usize>,
    max_takeoff: f64,
    uav: &UavParams,
    model: &BatteryModel,
) -> Result<Vec<SizingRow>, BatteryError> {
    let mut rows = Vec::new();
    for n in n_range {
        if n == 0 {
            return Err(BatteryError::NoCells);
        }
        let w = body_weight + n as f64 * cell_weight * GRAVITY;
        let p = total_power(&uav.with_weight(w), 0.0);
        let r = flight_time(&model.clone().with_cells(n), p, 1.0);
        rows.push(SizingRow {
            n_cells: n,
            hover_minutes: r.minutes(),
            constrained: w / GRAVITY > max_takeoff + 1e-12,
            truncated: r.truncated(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(range: std::ops::RangeInclusive<usize>) -> Vec<SizingRow> {
        sizing_sweep(
            2.0 * GRAVITY,
            0.05,
            range,
            3.6,
            &UavParams::default(),
            &BatteryModel::default_fitted(),
        )
        .unwrap()
    }

    #[test]
    fn zero_cells_rejected() {
        let r = sizing_sweep(20.0, 0.05, [0], 3.6, &UavParams::default(), &BatteryModel::default_fitted());
        assert!(matches!(r, Err(BatteryError::NoCells)));
    }

    #[test]
    fn constrained_boundary_at_32() {
        let rows = sweep(1..=60);
        let last_ok = rows.iter().filter(|r| !r.constrained).map(|r| r.n_cells).max().unwrap();
        assert_eq!(last_ok, 32);
        let best = rows
            .iter()
            .filter(|r| !r.constrained)
            .max_by(|a, b| a.hover_minutes.total_cmp(&b.hover_minutes))
            .unwrap();
        assert_eq!(best.n_cells, 32);
        assert_eq!(rows[0].hover_minutes, rows.iter().map(|r| r.hover_minutes).fold(f64::INFINITY, f64::min));
    }

    #[test]
    fn heavy_packs_eventually_lose() {
        // With 50 g cells the endurance peak lies beyond 60 cells.
        let rows = sweep(4..=300);
        let (imax, _) = rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.hover_minutes.total_cmp(&b.1.hover_minutes))
            .unwrap();
        assert!(imax > 0 && imax < rows.len() - 1);
        assert!(rows[imax].n_cells > 60);
    }
}

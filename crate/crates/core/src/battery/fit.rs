use super::{BatteryError, BatteryModel, DischargeCurvePoint};
use crate::numeric::solve_dense;
use serde::{Deserialize, Serialize};

/// `a0 + a1·I`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub a0: f64,
    pub a1: f64,
}

impl Linear {
    pub fn eval(&self, i: f64) -> f64 {
        self.a0 + self.a1 * i
    }
}

/// `c0 + c1·I + c2·I²`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Quadratic {
    pub fn eval(&self, i: f64) -> f64 {
        self.c0 + i * (self.c1 + i * self.c2)
    }
}

/// `(p1·I + p2) / (I + q1)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rational {
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
}

impl Rational {
    pub fn eval(&self, i: f64) -> f64 {
        (self.p1 * i + self.p2) / (i + self.q1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub n_cells: usize,
    pub cell_weight: f64,
    pub v_cutoff: f64,
    pub v_rated: f64,
    pub extrapolation_margin: f64,
    pub max_cell_current: f64,
    /// Upper end of the q1 search grid.
    pub q1_max: f64,
    pub q1_grid: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_cells: 17,
            cell_weight: 0.05,
            v_cutoff: 3.2,
            v_rated: 3.67,
            extrapolation_margin: 2.0,
            max_cell_current: 10.0,
            q1_max: 100.0,
            q1_grid: 4000,
        }
    }
}

pub fn r_squared(y: &[f64], yhat: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum();
    if ss_tot <= f64::EPSILON * mean.abs().max(1.0) {
        return if ss_res <= 1e-18 { 1.0 } else { 0.0 };
    }
    1.0 - ss_res / ss_tot
}

/// Ordinary least squares on the given basis columns.
fn least_squares(cols: &[Vec<f64>], y: &[f64], what: &'static str) -> Result<Vec<f64>, BatteryError> {
    let p = cols.len();
    let mut ata = vec![vec![0.0; p]; p];
    let mut aty = vec![0.0; p];
    for r in 0..p {
        for c in 0..p {
            ata[r][c] = cols[r].iter().zip(&cols[c]).map(|(a, b)| a * b).sum();
        }
        aty[r] = cols[r].iter().zip(y).map(|(a, b)| a * b).sum();
    }
    solve_dense(ata, aty).ok_or(BatteryError::Singular(what))
}

fn fit_rational(x: &[f64], y: &[f64], cfg: &FitConfig) -> Result<Rational, BatteryError> {
    let xmin = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let sse_at = |q1: f64| -> Option<(f64, Rational)> {
        let c1: Vec<f64> = x.iter().map(|i| i / (i + q1)).collect();
        let c2: Vec<f64> = x.iter().map(|i| 1.0 / (i + q1)).collect();
        let c = least_squares(&[c1, c2], y, "capacity").ok()?;
        let r = Rational { p1: c[0], p2: c[1], q1 };
        let sse = x.iter().zip(y).map(|(i, v)| (v - r.eval(*i)).powi(2)).sum();
        Some((sse, r))
    };
    // q1 > -min(I) keeps the pole outside the data
    let lo = -xmin + 1e-3 * xmin.max(1e-3);
    let n = cfg.q1_grid.max(10);
    let mut best: Option<(f64, Rational, usize)> = None;
    let grid: Vec<f64> = (0..n)
        .map(|k| {
            // denser near the pole
            let s = k as f64 / (n - 1) as f64;
            lo + (cfg.q1_max - lo) * s * s
        })
        .collect();
    for (k, &q) in grid.iter().enumerate() {
        if let Some((sse, r)) = sse_at(q) {
            if best.is_none_or(|b| sse < b.0) {
                best = Some((sse, r, k));
            }
        }
    }
    let (mut best_sse, mut best_r, k) = best.ok_or(BatteryError::Singular("capacity"))?;
    // golden refinement between the neighbouring grid nodes
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(n - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        let fc = sse_at(c).map_or(f64::INFINITY, |v| v.0);
        let fd = sse_at(d).map_or(f64::INFINITY, |v| v.0);
        if fc < fd {
            b = d;
        } else {
            a = c;
        }
    }
    if let Some((sse, r)) = sse_at(0.5 * (a + b)) {
        if sse < best_sse {
            best_sse = sse;
            best_r = r;
        }
    }
    let _ = best_sse;
    Ok(best_r)
}

fn distinct_currents(points: &[DischargeCurvePoint]) -> usize {
    let mut xs: Vec<f64> = points.iter().map(|p| p.current).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    xs.len()
}

pub fn fit_battery(points: &[DischargeCurvePoint], cfg: &FitConfig) -> Result<BatteryModel, BatteryError> {
    let distinct = distinct_currents(points);
    if distinct < 3 {
        return Err(BatteryError::InsufficientPoints { needed: 3, got: distinct });
    }
    if cfg.n_cells == 0 {
        return Err(BatteryError::NoCells);
    }
    let x: Vec<f64> = points.iter().map(|p| p.current).collect();
    let ones = vec![1.0; x.len()];
    let x2: Vec<f64> = x.iter().map(|i| i * i).collect();

    let vmax: Vec<f64> = points.iter().map(|p| p.v_max).collect();
    let c = least_squares(&[ones.clone(), x.clone()], &vmax, "v_max")?;
    let f_vmax = Linear { a0: c[0], a1: c[1] };

    let vmin: Vec<f64> = points.iter().map(|p| p.v_min).collect();
    let c = least_squares(&[ones, x.clone(), x2], &vmin, "v_min")?;
    let f_vmin = Quadratic { c0: c[0], c1: c[1], c2: c[2] };

    let e: Vec<f64> = points.iter().map(|p| p.e_max).collect();
    let f_e = fit_rational(&x, &e, cfg)?;

    let pred = |f: &dyn Fn(f64) -> f64| x.iter().map(|&i| f(i)).collect::<Vec<_>>();
    let fit_r2 = [
        r_squared(&vmax, &pred(&|i| f_vmax.eval(i))),
        r_squared(&vmin, &pred(&|i| f_vmin.eval(i))),
        r_squared(&e, &pred(&|i| f_e.eval(i))),
    ];
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(BatteryModel {
        f_vmax,
        f_vmin,
        f_e,
        n_cells: cfg.n_cells,
        cell_weight: cfg.cell_weight,
        v_cutoff: cfg.v_cutoff,
        v_rated: cfg.v_rated,
        fit_r2,
        current_range: (lo, hi),
        extrapolation_margin: cfg.extrapolation_margin,
        max_cell_current: cfg.max_cell_current,
    })
}

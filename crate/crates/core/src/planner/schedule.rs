use super::RateTable;
use crate::lp::{maximize, LpError, Sense};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// `t_mn[m][n]`, s.
    pub t_mn: Vec<Vec<f64>>,
    /// Bits every GN is guaranteed per lap.
    pub t_star: f64,
    /// GNs with zero rate on every segment.
    pub starved: Vec<usize>,
}

impl Schedule {
    pub fn scaled_time(&self, c: f64) -> Self {
        Self {
            t_mn: self.t_mn.iter().map(|r| r.iter().map(|v| v * c).collect()).collect(),
            t_star: self.t_star * c,
            starved: self.starved.clone(),
        }
    }

    /// Bits delivered to each GN in one lap.
    pub fn bits_per_gn(&self, rates: &RateTable) -> Vec<f64> {
        (0..rates.gns())
            .map(|n| (0..rates.segments()).map(|m| self.t_mn[m][n] * rates.d[m][n]).sum())
            .collect()
    }
}

/// Max-min TDMA schedule: maximise the bits the worst GN receives in one lap.
pub fn maxmin_schedule(rates: &RateTable, t_m: &[f64]) -> Result<Schedule, LpError> {
    let (mm, nn) = (rates.segments(), rates.gns());
    assert_eq!(t_m.len(), mm, "one duration per segment");
    assert!(t_m.iter().all(|&t| t > 0.0), "segment durations must be positive");
    let starved: Vec<usize> = (0..nn).filter(|&n| (0..mm).all(|m| rates.d[m][n] <= 0.0)).collect();
    let zero = Schedule { t_mn: vec![vec![0.0; nn]; mm], t_star: 0.0, starved: starved.clone() };
    if nn == 0 || mm == 0 || !starved.is_empty() {
        return Ok(zero);
    }
    // scale to O(1) coefficients
    let dmax = rates.max();
    let tmax = t_m.iter().cloned().fold(0.0, f64::max);
    let vars: Vec<(usize, usize)> = (0..mm)
        .flat_map(|m| (0..nn).map(move |n| (m, n)))
        .filter(|&(m, n)| rates.d[m][n] > 0.0)
        .collect();
    let nv = vars.len() + 1;
    let tcol = vars.len();
    let mut a = Vec::with_capacity(nn + mm);
    let mut b = Vec::with_capacity(nn + mm);
    for n in 0..nn {
        let mut row = vec![0.0; nv];
        row[tcol] = 1.0;
        for (j, &(m, k)) in vars.iter().enumerate() {
            if k == n {
                row[j] = -rates.d[m][n] / dmax;
            }
        }
        a.push(row);
        b.push(0.0);
    }
    for (m, &tm) in t_m.iter().enumerate() {
        let mut row = vec![0.0; nv];
        for (j, &(k, _)) in vars.iter().enumerate() {
            if k == m {
                row[j] = 1.0;
            }
        }
        a.push(row);
        b.push(tm / tmax);
    }
    let mut c = vec![0.0; nv];
    c[tcol] = 1.0;
    let sense = vec![Sense::Le; a.len()];
    let sol = maximize(&c, &a, &sense, &b)?;
    let mut t_mn = vec![vec![0.0; nn]; mm];
    for (j, &(m, n)) in vars.iter().enumerate() {
        t_mn[m][n] = sol.x[j] * tmax;
    }
    // clip round-off so per-segment totals never exceed the segment time
    for (m, row) in t_mn.iter_mut().enumerate() {
        let s: f64 = row.iter().sum();
        if s > t_m[m] {
            let f = t_m[m] / s;
            row.iter_mut().for_each(|v| *v *= f);
        }
    }
    let mut out = Schedule { t_mn, t_star: 0.0, starved };
    out.t_star = out.bits_per_gn(rates).into_iter().fold(f64::INFINITY, f64::min);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_gn_split() {
        let r = RateTable::new(vec![vec![10.0, 10.0]]);
        let s = maxmin_schedule(&r, &[1.0]).unwrap();
        assert!((s.t_star - 5.0).abs() < 1e-9);
        assert!((s.t_mn[0][0] - 0.5).abs() < 1e-9 && (s.t_mn[0][1] - 0.5).abs() < 1e-9);
        // brute force over a fine grid of splits
        let best = (0..=1000)
            .map(|k| {
                let x = k as f64 / 1000.0;
                (10.0 * x).min(10.0 * (1.0 - x))
            })
            .fold(0.0, f64::max);
        assert!((best - s.t_star).abs() < 1e-9);
    }

    #[test]
    fn single_gn_takes_everything() {
        let r = RateTable::new(vec![vec![3.0], vec![5.0], vec![1.0]]);
        let s = maxmin_schedule(&r, &[1.0, 2.0, 0.5]).unwrap();
        assert!((s.t_star - (3.0 + 10.0 + 0.5)).abs() < 1e-9);
    }

    #[test]
    fn starved_gn_flagged() {
        let r = RateTable::new(vec![vec![3.0, 0.0], vec![5.0, 0.0]]);
        let s = maxmin_schedule(&r, &[1.0, 1.0]).unwrap();
        assert_eq!(s.t_star, 0.0);
        assert_eq!(s.starved, vec![1]);
    }

    #[test]
    fn scale_covariance() {
        let r = RateTable::new(vec![vec![3.0, 1.0, 2.0], vec![0.5, 4.0, 1.0]]);
        let a = maxmin_schedule(&r, &[1.0, 1.5]).unwrap();
        let b = maxmin_schedule(&r.scaled(7.5e7), &[1.0, 1.5]).unwrap();
        assert!((b.t_star / a.t_star - 7.5e7).abs() < 1e-6);
        assert_eq!(a.t_mn, b.t_mn);
    }
}

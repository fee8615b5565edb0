//! One parametric subproblem: maximise `N(x) − λ D(x)` over the convexified
//! single-lap feasible set, as a conic program.

use super::convexified::{convexified_energy, exact_slack};
use super::BaselineError;
use crate::power::EnergyConstants;
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, NonnegativeConeT, PowerConeT, SecondOrderConeT, SolverStatus,
    SupportedConeT,
};

/// Internal units: bits in Gbit, energy in kJ.
pub(crate) const BIT_SCALE: f64 = 1e-9;
pub(crate) const ENERGY_SCALE: f64 = 1e-3;
/// Internal time units tried in turn, s; the interior-point method can stall
/// on one scaling and succeed on another.
const TIME_SCALES: [f64; 4] = [0.1, 1.0, 0.03, 10.0];

pub(crate) struct Subproblem<'a> {
    pub consts: &'a EnergyConstants,
    pub seg_len: &'a [f64],
    /// Rates, bits/s.
    pub rates: &'a [Vec<f64>],
    pub q_bits: f64,
    pub v_max: f64,
    pub t_max: f64,
    pub z_ref: &'a [f64],
}

#[derive(Debug, Clone)]
pub(crate) struct SubSolution {
    pub t_m: Vec<f64>,
    pub t_mn: Vec<Vec<f64>>,
    pub z_m: Vec<f64>,
    /// Delivered bits.
    pub numerator: f64,
    /// Convexified energy at the returned slack, J.
    pub denominator: f64,
}

struct Triplets {
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    b: Vec<f64>,
}

impl Triplets {
    fn row(&mut self, entries: &[(usize, f64)], b: f64) {
        let r = self.b.len();
        for &(c, v) in entries {
            if v != 0.0 {
                self.rows.push(r);
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        self.b.push(b);
    }
}

impl Subproblem<'_> {
    fn width(&self) -> usize {
        5 + self.rates.first().map_or(0, Vec::len)
    }

    /// Solve at parameter `lambda` (bits/J).
    pub fn solve(&self, lambda: f64) -> Result<SubSolution, BaselineError> {
        let mut last = None;
        for ts in TIME_SCALES {
            match self.solve_scaled(lambda, ts) {
                Ok(s) => return Ok(s),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one scale"))
    }

    fn solve_scaled(&self, lambda: f64, ts: f64) -> Result<SubSolution, BaselineError> {
        let m_seg = self.seg_len.len();
        let n_gn = self.rates.first().map_or(0, Vec::len);
        let w = self.width();
        let nvar = m_seg * w;
        let (it, iz, iu, is, iq) = (0, 1, 2, 3, 4);
        let var = |m: usize, k: usize| m * w + k;
        let tmn = |m: usize, n: usize| m * w + 5 + n;
        let c = self.consts;
        let lam = lambda * BIT_SCALE / ENERGY_SCALE;
        let es = ENERGY_SCALE;

        let mut q = vec![0.0; nvar];
        for m in 0..m_seg {
            let d = self.seg_len[m];
            q[var(m, it)] = lam * es * c.c1 * ts;
            q[var(m, iu)] = lam * es * c.c1 * 3.0 * d * d / (c.v_tip * c.v_tip * ts);
            q[var(m, is)] = lam * es * c.c2 * d.powi(3) / (ts * ts);
            q[var(m, iz)] = lam * es * c.c3 * ts;
            for n in 0..n_gn {
                q[tmn(m, n)] = -self.rates[m][n] * BIT_SCALE * ts;
            }
        }

        let mut a = Triplets { rows: vec![], cols: vec![], vals: vec![], b: vec![] };
        for m in 0..m_seg {
            a.row(&[(var(m, it), -1.0)], -self.seg_len[m] / (self.v_max * ts));
        }
        let total: Vec<(usize, f64)> = (0..m_seg).map(|m| (var(m, it), 1.0)).collect();
        a.row(&total, self.t_max / ts);
        for m in 0..m_seg {
            let mut e: Vec<(usize, f64)> = (0..n_gn).map(|n| (tmn(m, n), 1.0)).collect();
            e.push((var(m, it), -1.0));
            a.row(&e, 0.0);
        }
        for n in 0..n_gn {
            let e: Vec<(usize, f64)> = (0..m_seg).map(|m| (tmn(m, n), -self.rates[m][n] * BIT_SCALE * ts)).collect();
            a.row(&e, -self.q_bits * BIT_SCALE);
        }
        for m in 0..m_seg {
            for n in 0..n_gn {
                a.row(&[(tmn(m, n), -1.0)], 0.0);
            }
        }
        let n_nonneg = a.b.len();
        let mut cones: Vec<SupportedConeT<f64>> = vec![NonnegativeConeT(n_nonneg)];
        for m in 0..m_seg {
            let (t, z, u, s, qq) = (var(m, it), var(m, iz), var(m, iu), var(m, is), var(m, iq));
            // u T ≥ 1
            a.row(&[(u, -1.0), (t, -1.0)], 0.0);
            a.row(&[], 2.0);
            a.row(&[(u, -1.0), (t, 1.0)], 0.0);
            cones.push(SecondOrderConeT(3));
            // z q ≥ T²
            a.row(&[(z, -1.0), (qq, -1.0)], 0.0);
            a.row(&[(t, -2.0)], 0.0);
            a.row(&[(z, -1.0), (qq, 1.0)], 0.0);
            cones.push(SecondOrderConeT(3));
            // q² ≤ g(z), g affine in z
            // slack and q in units of the time scale; Δ enters g as Δ/ts
            let zr = self.z_ref[m] / ts;
            let d = self.seg_len[m] / ts;
            let ga = 2.0 * zr / c.c4;
            let gc = (d * d - zr * zr) / c.c4;
            a.row(&[(z, -ga)], gc + 1.0);
            a.row(&[(qq, -2.0)], 0.0);
            a.row(&[(z, -ga)], gc - 1.0);
            cones.push(SecondOrderConeT(3));
            // T^(2/3) s^(1/3) ≥ 1
            a.row(&[(t, -1.0)], 0.0);
            a.row(&[(s, -1.0)], 0.0);
            a.row(&[], 1.0);
            cones.push(PowerConeT(2.0 / 3.0));
        }

        let nrow = a.b.len();
        let amat = CscMatrix::new_from_triplets(nrow, nvar, a.rows, a.cols, a.vals);
        let p = CscMatrix::zeros((nvar, nvar));
        let settings = DefaultSettings { verbose: false, max_iter: 300, ..DefaultSettings::default() };
        let mut solver = DefaultSolver::new(&p, &q, &amat, &a.b, &cones, settings)
            .map_err(|e| BaselineError::Solver(format!("{e:?}")))?;
        solver.solve();
        let sol = &solver.solution;
        match sol.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => {}
            st => {
                return Err(BaselineError::Solver(format!(
                    "{st:?} (primal residual {:.2e}, dual residual {:.2e}, objective {:.6e} / {:.6e})",
                    sol.r_prim, sol.r_dual, sol.obj_val, sol.obj_val_dual
                )))
            }
        }
        let x = &sol.x;
        let t_m: Vec<f64> = (0..m_seg).map(|m| (x[var(m, it)] * ts).max(self.seg_len[m] / self.v_max)).collect();
        let t_mn: Vec<Vec<f64>> = (0..m_seg)
            .map(|m| {
                let raw: Vec<f64> = (0..n_gn).map(|n| (x[tmn(m, n)] * ts).max(0.0)).collect();
                // clip interior-point round-off so Σ_n T_mn ≤ T_m holds exactly
                let sum: f64 = raw.iter().sum();
                let k = if sum > t_m[m] { t_m[m] / sum } else { 1.0 };
                raw.into_iter().map(|v| v * k).collect()
            })
            .collect();
        // slack never below the exact value for its T
        let z_m: Vec<f64> =
            (0..m_seg).map(|m| (x[var(m, iz)] * ts).max(exact_slack(c, self.seg_len[m], t_m[m]))).collect();
        let numerator = t_mn
            .iter()
            .zip(self.rates)
            .map(|(t, d)| t.iter().zip(d).map(|(a, b)| a * b).sum::<f64>())
            .sum();
        let mut denominator = 0.0;
        for m in 0..m_seg {
            denominator += convexified_energy(c, self.seg_len[m], t_m[m], z_m[m])
                .map_err(|e| BaselineError::Solver(e.to_string()))?;
        }
        Ok(SubSolution { t_m, t_mn, z_m, numerator, denominator })
    }
}

//! Dense two-phase simplex for small linear programs.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const EPS: f64 = 1e-10;
/// Degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_SWITCH: usize = 50;

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows+1` rows of `cols+1` entries; last row is the objective, last column the rhs.
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.t[pr * w + pc];
        for c in 0..w {
            self.t[pr * w + c] /= p;
        }
        let prow: Vec<f64> = self.t[pr * w..(pr + 1) * w].to_vec();
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.t[r * w + pc];
            if f.abs() > 0.0 {
                let row = &mut self.t[r * w..(r + 1) * w];
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Maximise the objective row (stored as reduced costs `-c`) over allowed columns.
    fn run(&mut self, allowed: usize, max_pivots: usize, pivots: &mut usize) -> Result<(), LpError> {
        let mut degenerate = 0usize;
        loop {
            let obj = self.rows;
            let bland = degenerate >= DEGENERATE_SWITCH;
            let mut enter = None;
            let mut most = -EPS;
            for c in 0..allowed {
                let rc = self.at(obj, c);
                if rc < -EPS {
                    if bland {
                        enter = Some(c);
                        break;
                    }
                    if rc < most {
                        most = rc;
                        enter = Some(c);
                    }
                }
            }
            let Some(pc) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lv)) => {
                            ratio < lv - EPS || (ratio <= lv + EPS && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, ratio)) = leave else { return Err(LpError::Unbounded) };
            degenerate = if ratio.abs() <= EPS { degenerate + 1 } else { 0 };
            self.pivot(pr, pc);
            *pivots += 1;
            if *pivots > max_pivots {
                return Err(LpError::IterationLimit);
            }
        }
    }
}

/// Maximise `c·x` subject to `a_i·x (sense_i) b_i`, `x ≥ 0`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], sense: &[Sense], b: &[f64]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = a.len();
    assert_eq!(sense.len(), m);
    assert_eq!(b.len(), m);
    // normalise to non-negative rhs
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = a
        .iter()
        .zip(sense)
        .zip(b)
        .map(|((r, &s), &bi)| {
            assert_eq!(r.len(), n);
            if bi < 0.0 {
                let flipped = match s {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
                (r.iter().map(|v| -v).collect(), flipped, -bi)
            } else {
                (r.clone(), s, bi)
            }
        })
        .collect();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let cols = n + n_slack + n_art;
    let w = cols + 1;
    let mut t = vec![0.0; (m + 1) * w];
    let mut basis = vec![0; m];
    let (mut si, mut ai) = (n, n + n_slack);
    let mut art_rows = Vec::new();
    for (r, (row, s, bi)) in rows.iter_mut().enumerate() {
        t[r * w..r * w + n].copy_from_slice(row);
        t[r * w + cols] = *bi;
        match s {
            Sense::Le => {
                t[r * w + si] = 1.0;
                basis[r] = si;
                si += 1;
            }
            Sense::Ge => {
                t[r * w + si] = -1.0;
                si += 1;
                t[r * w + ai] = 1.0;
                basis[r] = ai;
                ai += 1;
                art_rows.push(r);
            }
            Sense::Eq => {
                t[r * w + ai] = 1.0;
                basis[r] = ai;
                ai += 1;
                art_rows.push(r);
            }
        }
    }
    let mut tab = Tableau { rows: m, cols, t, basis };
    let max_pivots = 50 * (m + cols).max(100);
    let mut pivots = 0;

    if n_art > 0 {
        // phase 1: maximise -Σ artificials
        for c in n + n_slack..cols {
            tab.t[m * w + c] = 1.0;
        }
        for &r in &art_rows {
            for c in 0..w {
                tab.t[m * w + c] -= tab.t[r * w + c];
            }
        }
        tab.run(cols, max_pivots, &mut pivots)?;
        if tab.at(m, cols).abs() > 1e-7 * (1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            return Err(LpError::Infeasible);
        }
        // drive zero-level artificials out of the basis
        for r in 0..m {
            if tab.basis[r] >= n + n_slack {
                if let Some(pc) = (0..n + n_slack).find(|&c| tab.at(r, c).abs() > 1e-9) {
                    tab.pivot(r, pc);
                }
            }
        }
    }
    // phase 2 objective
    for c in 0..w {
        tab.t[m * w + c] = 0.0;
    }
    for (j, &cj) in c.iter().enumerate() {
        tab.t[m * w + j] = -cj;
    }
    for r in 0..m {
        let bc = tab.basis[r];
        let f = tab.t[m * w + bc];
        if f != 0.0 {
            for col in 0..w {
                tab.t[m * w + col] -= f * tab.t[r * w + col];
            }
        }
    }
    tab.run(n + n_slack, max_pivots, &mut pivots)?;
    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.rhs(r).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, objective, pivots })
}

//! Dense two-phase simplex for `min c·x  s.t.  A x = b, x ≥ 0`.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! basic variable among tied ratios), which cannot cycle and makes the
//! returned vertex a deterministic function of the input.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::Error;

/// Feasibility and optimality tolerance.
pub const LP_TOL: f64 = 1e-9;
const PIVOT_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

struct Tableau {
    /// `m` constraint rows, then the reduced-cost row; last column is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn rhs(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for x in self.t[row].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (x, &y) in r.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations with entering candidates `0..n_cols`.
    fn optimize(&mut self, n_cols: usize, pivots: &mut usize) -> Result<(), Error> {
        let obj = self.m();
        let rhs = self.rhs();
        loop {
            let Some(col) = (0..n_cols).find(|&j| self.t[obj][j] < -LP_TOL) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m() {
                let a = self.t[i][col];
                if a > LP_TOL {
                    let ratio = self.t[i][rhs] / a;
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - LP_TOL
                                || ((ratio - best).abs() <= LP_TOL && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            *pivots += 1;
            if *pivots > PIVOT_LIMIT {
                return Err(Error::InvalidParameter(format!(
                    "simplex exceeded {PIVOT_LIMIT} pivots"
                )));
            }
            self.pivot(row, col);
        }
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, a_eq: Vec<Vec<f64>>, b_eq: Vec<f64>) -> Result<Self, Error> {
        let n = objective.len();
        if a_eq.len() != b_eq.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} constraint rows but {} right-hand sides",
                a_eq.len(),
                b_eq.len()
            )));
        }
        if let Some(row) = a_eq.iter().find(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "constraint row has {} columns, objective has {n}",
                row.len()
            )));
        }
        let finite = objective.iter().chain(a_eq.iter().flatten()).chain(&b_eq).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("LP data must be finite".into()));
        }
        Ok(LinearProgram {
            objective,
            a_eq,
            b_eq,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn solve(&self) -> Result<LpSolution, Error> {
        let n = self.n_vars();
        let m = self.a_eq.len();
        let width = n + m + 1;
        let mut t = Vec::with_capacity(m + 1);
        for (row, &b) in self.a_eq.iter().zip(&self.b_eq) {
            let sign = if b < 0.0 { -1.0 } else { 1.0 };
            let mut r = vec![0.0; width];
            for (x, &a) in r.iter_mut().zip(row) {
                *x = sign * a;
            }
            r[width - 1] = sign * b;
            t.push(r);
        }
        for (i, r) in t.iter_mut().enumerate() {
            r[n + i] = 1.0;
        }
        // Phase 1: minimize the sum of artificials.
        let mut cost_row = vec![0.0; width];
        for r in &t {
            for j in 0..n {
                cost_row[j] -= r[j];
            }
            cost_row[width - 1] -= r[width - 1];
        }
        t.push(cost_row);
        let mut tab = Tableau {
            t,
            basis: (n..n + m).collect(),
            width,
        };
        let mut pivots = 0;
        tab.optimize(n + m, &mut pivots)?;
        let infeasibility = -tab.t[m][width - 1];
        if infeasibility > LP_TOL {
            return Err(Error::Infeasible);
        }

        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.m() {
            if tab.basis[i] >= n {
                if let Some(col) = (0..n).find(|&j| tab.t[i][j].abs() > LP_TOL) {
                    tab.pivot(i, col);
                    i += 1;
                } else {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }

        // Phase 2 reduced costs for the original objective.
        let m = tab.m();
        let mut obj = vec![0.0; width];
        obj[..n].copy_from_slice(&self.objective);
        for r in 0..m {
            let cb = self.objective[tab.basis[r]];
            if cb != 0.0 {
                for j in 0..width {
                    obj[j] -= cb * tab.t[r][j];
                }
            }
        }
        for v in obj[n..width - 1].iter_mut() {
            *v = 0.0;
        }
        tab.t[m] = obj;
        tab.optimize(n, &mut pivots)?;

        let mut x = vec![0.0; n];
        for (r, &var) in tab.basis.iter().enumerate() {
            if var < n {
                x[var] = tab.t[r][width - 1].max(0.0);
            }
        }
        let value = x.iter().zip(&self.objective).map(|(x, c)| x * c).sum();
        Ok(LpSolution { x, value })
    }
}

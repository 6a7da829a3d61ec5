//! Two-phase primal simplex on a dense tableau.
//!
//! Variables are shifted to `x - lo >= 0`; finite upper bounds become
//! extra rows. Every row is normalized to an equality with nonnegative
//! right-hand side using one slack or surplus column, and rows whose
//! surplus cannot start basic get an artificial column driven to zero in
//! phase one. Pricing is Dantzig (most negative reduced cost) and falls
//! back to Bland's rule once the degenerate-pivot budget of
//! `10 * (rows + vars)` is spent, which guarantees termination.

use super::{LinearProgram, LpSolution, LpStatus, FEAS_TOL, OPT_TOL};
use crate::{Error, Result};

/// Smallest usable pivot element.
const PIVOT_TOL: f64 = 1e-9;

/// A ratio-test step below this counts as a degenerate pivot.
const DEGENERATE_STEP: f64 = 1e-12;

/// Reduced costs are recomputed from scratch this often to shed drift.
const REFRESH_EVERY: usize = 256;

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau {
    cols: usize,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    rc: Vec<f64>,
    cost: Vec<f64>,
    degenerate_budget: usize,
    degenerate_count: usize,
    bland: bool,
    iterations_left: usize,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.a.len()
    }

    fn set_cost(&mut self, cost: Vec<f64>) {
        debug_assert_eq!(cost.len(), self.cols);
        self.cost = cost;
        self.refresh_reduced_costs();
    }

    fn refresh_reduced_costs(&mut self) {
        self.rc = self.cost.clone();
        for (i, row) in self.a.iter().enumerate() {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                for (rc, &aij) in self.rc.iter_mut().zip(row) {
                    *rc -= cb * aij;
                }
            }
        }
        for &j in &self.basis {
            self.rc[j] = 0.0;
        }
    }

    /// Objective value of the current basic solution under `cost`.
    fn basic_objective(&self) -> f64 {
        self.basis.iter().zip(&self.b).map(|(&j, &bi)| self.cost[j] * bi).sum()
    }

    fn entering(&self) -> Option<usize> {
        if self.bland {
            (0..self.cols).find(|&j| !self.in_basis[j] && self.rc[j] < -OPT_TOL)
        } else {
            let mut best = None;
            let mut best_rc = -OPT_TOL;
            for j in 0..self.cols {
                if !self.in_basis[j] && self.rc[j] < best_rc {
                    best_rc = self.rc[j];
                    best = Some(j);
                }
            }
            best
        }
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows() {
            let aij = self.a[i][col];
            if aij <= PIVOT_TOL {
                continue;
            }
            let ratio = self.b[i] / aij;
            match best {
                None => best = Some((i, ratio)),
                Some((bi, br)) => {
                    let close = (ratio - br).abs() <= 1e-9 * (1.0 + br.abs());
                    let better = if close {
                        if self.bland {
                            self.basis[i] < self.basis[bi]
                        } else {
                            // Prefer the larger pivot for stability, then
                            // the lower basis index for determinism.
                            aij > self.a[bi][col]
                                || (aij == self.a[bi][col] && self.basis[i] < self.basis[bi])
                        }
                    } else {
                        ratio < br
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = 1.0 / self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v *= inv;
        }
        self.b[row] *= inv;
        self.a[row][col] = 1.0;
        for i in 0..self.rows() {
            if i == row {
                continue;
            }
            let factor = self.a[i][col];
            if factor == 0.0 {
                continue;
            }
            let (target, source) = if i < row {
                let (head, tail) = self.a.split_at_mut(row);
                (&mut head[i], &tail[0])
            } else {
                let (head, tail) = self.a.split_at_mut(i);
                (&mut tail[0], &head[row])
            };
            for (t, &s) in target.iter_mut().zip(source) {
                *t -= factor * s;
            }
            target[col] = 0.0;
            self.b[i] -= factor * self.b[row];
            if self.b[i] < 0.0 && self.b[i] > -1e-11 {
                self.b[i] = 0.0;
            }
        }
        let factor = self.rc[col];
        if factor != 0.0 {
            for (rc, &s) in self.rc.iter_mut().zip(&self.a[row]) {
                *rc -= factor * s;
            }
        }
        self.rc[col] = 0.0;
        self.in_basis[self.basis[row]] = false;
        self.in_basis[col] = true;
        self.basis[row] = col;
    }

    fn optimize(&mut self) -> Result<PhaseEnd> {
        let mut since_refresh = 0;
        loop {
            let Some(col) = self.entering() else {
                return Ok(PhaseEnd::Optimal);
            };
            let Some(row) = self.leaving(col) else {
                return Ok(PhaseEnd::Unbounded);
            };
            if self.b[row] / self.a[row][col] < DEGENERATE_STEP {
                self.degenerate_count += 1;
                if self.degenerate_count > self.degenerate_budget {
                    self.bland = true;
                }
            }
            self.pivot(row, col);
            since_refresh += 1;
            if since_refresh == REFRESH_EVERY {
                self.refresh_reduced_costs();
                since_refresh = 0;
            }
            if self.iterations_left == 0 {
                return Err(Error::SolverStalled);
            }
            self.iterations_left -= 1;
        }
    }
}

pub(crate) fn solve_simplex(lp: &LinearProgram) -> Result<LpSolution> {
    let nv = lp.num_vars();
    let lower = lp.lower_bounds();
    let upper = lp.upper_bounds();

    // Shifted rows: user rows rewritten over x - lo, then cap rows for
    // finite upper bounds. Each entry is (coefficients, rhs).
    let mut specs: Vec<(Vec<(usize, f64)>, f64)> = Vec::with_capacity(lp.num_rows());
    for row in lp.rows() {
        let shift: f64 = row.coeffs.iter().map(|&(j, c)| c * lower[j]).sum();
        specs.push((row.coeffs.clone(), row.rhs - shift));
    }
    for j in 0..nv {
        if upper[j].is_finite() {
            specs.push((vec![(j, -1.0)], lower[j] - upper[j]));
        }
    }

    let m = specs.len();
    let artificial: Vec<bool> = specs.iter().map(|&(_, rhs)| rhs > 0.0).collect();
    let num_artificial = artificial.iter().filter(|&&x| x).count();
    let core_cols = nv + m;
    let cols = core_cols + num_artificial;

    let mut a = vec![vec![0.0; cols]; m];
    let mut b = vec![0.0; m];
    let mut basis = Vec::with_capacity(m);
    let mut next_artificial = core_cols;
    for (i, (coeffs, rhs)) in specs.iter().enumerate() {
        if artificial[i] {
            // a.xs - s + artificial = rhs with rhs > 0.
            for &(j, c) in coeffs {
                a[i][j] += c;
            }
            a[i][nv + i] = -1.0;
            a[i][next_artificial] = 1.0;
            b[i] = *rhs;
            basis.push(next_artificial);
            next_artificial += 1;
        } else {
            // Negated: (-a).xs + s = -rhs with -rhs >= 0, slack basic.
            for &(j, c) in coeffs {
                a[i][j] -= c;
            }
            a[i][nv + i] = 1.0;
            b[i] = -rhs;
            basis.push(nv + i);
        }
    }

    let mut in_basis = vec![false; cols];
    for &j in &basis {
        in_basis[j] = true;
    }
    let mut tab = Tableau {
        cols,
        a,
        b,
        basis,
        in_basis,
        rc: Vec::new(),
        cost: Vec::new(),
        degenerate_budget: 10 * (lp.num_rows() + nv),
        degenerate_count: 0,
        bland: false,
        iterations_left: 50_000 + 200 * (m + cols),
    };

    let rhs_scale = 1.0 + tab.b.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));

    if num_artificial > 0 {
        let mut phase1_cost = vec![0.0; cols];
        for c in phase1_cost.iter_mut().take(cols).skip(core_cols) {
            *c = 1.0;
        }
        tab.set_cost(phase1_cost);
        match tab.optimize()? {
            // Phase-1 objective is bounded below by zero.
            PhaseEnd::Unbounded => return Err(Error::SolverStalled),
            PhaseEnd::Optimal => {}
        }
        if tab.basic_objective() > FEAS_TOL * rhs_scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective_value: f64::NAN,
            });
        }
        // Pivot leftover artificials out on any usable core column; a row
        // with none is redundant and gets dropped.
        let mut drop_rows = Vec::new();
        for i in 0..tab.rows() {
            if tab.basis[i] < core_cols {
                continue;
            }
            match (0..core_cols)
                .find(|&j| !tab.in_basis[j] && tab.a[i][j].abs() > PIVOT_TOL)
            {
                Some(j) => tab.pivot(i, j),
                None => drop_rows.push(i),
            }
        }
        for &i in drop_rows.iter().rev() {
            tab.a.remove(i);
            tab.b.remove(i);
            let gone = tab.basis.remove(i);
            tab.in_basis[gone] = false;
        }
        for row in tab.a.iter_mut() {
            row.truncate(core_cols);
        }
        tab.cols = core_cols;
        tab.in_basis.truncate(core_cols);
        tab.rc.truncate(core_cols);
    }

    let mut phase2_cost = vec![0.0; tab.cols];
    phase2_cost[..nv].copy_from_slice(lp.objective());
    tab.set_cost(phase2_cost);
    match tab.optimize()? {
        PhaseEnd::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                values: Vec::new(),
                objective_value: f64::NAN,
            })
        }
        PhaseEnd::Optimal => {}
    }

    let mut values = lower.to_vec();
    for (i, &j) in tab.basis.iter().enumerate() {
        if j < nv {
            values[j] = lower[j] + tab.b[i];
        }
    }
    // Shave bound overshoot from accumulated pivot rounding.
    for j in 0..nv {
        values[j] = values[j].clamp(lower[j], upper[j]);
    }
    for row in lp.rows() {
        let violation = row.rhs - row.lhs(&values);
        if violation > 10.0 * FEAS_TOL * (1.0 + row.rhs.abs()) {
            return Err(Error::SolverStalled);
        }
    }
    let objective_value =
        lp.objective().iter().zip(&values).map(|(&c, &x)| c * x).sum();
    Ok(LpSolution { status: LpStatus::Optimal, values, objective_value })
}

//! Sparse linear programs in the form
//!
//! ```text
//! min  c . x    s.t.   sum_j a_rj x_j >= rhs_r  for every row r,
//!                      lo_j <= x_j <= hi_j      for every variable j,
//! ```
//!
//! solved by a deterministic two-phase simplex, plus lazy row generation
//! against separation oracles and the encoding of the truncated objective
//! `min_B B + sum_s p_s (expr_s - B)^+` as auxiliary variables and rows.

mod simplex;

use crate::objective::{ScenarioDistribution, MASS_TOL};
use crate::{Error, Result};

/// Feasibility tolerance: a point satisfies a row when it violates it by
/// at most this much (scaled by the row's magnitude).
pub const FEAS_TOL: f64 = 1e-7;

/// Optimality tolerance on reduced costs.
pub const OPT_TOL: f64 = 1e-7;

/// A `>=` constraint row over variable indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Row {
    /// Builds `sum coeffs >= rhs`, merging duplicate variables and
    /// dropping zero coefficients.
    pub fn ge(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs;
        sorted.sort_by_key(|&(var, _)| var);
        for (var, coef) in sorted {
            match merged.last_mut() {
                Some((last, acc)) if *last == var => *acc += coef,
                _ => merged.push((var, coef)),
            }
        }
        merged.retain(|&(_, coef)| coef != 0.0);
        Self { coeffs: merged, rhs }
    }

    /// Left-hand side evaluated at `point`.
    pub fn lhs(&self, point: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(var, coef)| coef * point[var]).sum()
    }
}

/// An affine expression `sum coeffs + constant` over LP variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub coeffs: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_constant(constant: f64) -> Self {
        Self { coeffs: Vec::new(), constant }
    }

    /// Adds `coef * x_var`, merging with an existing term on the same
    /// variable.
    pub fn add_term(&mut self, var: usize, coef: f64) {
        if let Some(entry) = self.coeffs.iter_mut().find(|(v, _)| *v == var) {
            entry.1 += coef;
        } else {
            self.coeffs.push((var, coef));
        }
    }

    pub fn value(&self, point: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().map(|&(var, coef)| coef * point[var]).sum::<f64>()
    }
}

/// Outcome classification of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve; `values` and `objective_value` are meaningful only
/// when `status` is [`LpStatus::Optimal`].
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
}

/// Produces a violated row for a point outside the implicitly described
/// polytope, or `None` when the point satisfies every row the oracle
/// knows about.
pub trait SeparationOracle {
    fn separate(&self, point: &[f64]) -> Option<Row>;
}

/// A minimization LP over bounded variables and `>=` rows.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `lo <= x <= hi` (`hi` may be infinite)
    /// and the given objective coefficient; returns its index.
    pub fn add_var(&mut self, objective: f64, lo: f64, hi: f64) -> usize {
        assert!(objective.is_finite(), "objective coefficient must be finite");
        assert!(lo.is_finite() && !hi.is_nan() && lo <= hi, "bounds must satisfy lo <= hi");
        self.objective.push(objective);
        self.lower.push(lo);
        self.upper.push(hi);
        self.objective.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        assert!(coeff.is_finite());
        self.objective[var] = coeff;
    }

    pub fn add_row(&mut self, row: Row) {
        assert!(
            row.coeffs.iter().all(|&(var, _)| var < self.num_vars()),
            "row references an unknown variable"
        );
        self.rows.push(row);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    /// Plain-text rendering for debugging and report files.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let term = |coef: f64, var: usize| format!("{coef} x{var}");
        let mut out = String::from("min");
        let obj: Vec<String> = (0..self.num_vars())
            .filter(|&j| self.objective[j] != 0.0)
            .map(|j| term(self.objective[j], j))
            .collect();
        if obj.is_empty() {
            out.push_str(" 0");
        } else {
            write!(out, " {}", obj.join(" + ")).unwrap();
        }
        out.push_str("\ns.t.\n");
        for (r, row) in self.rows.iter().enumerate() {
            let lhs: Vec<String> =
                row.coeffs.iter().map(|&(var, coef)| term(coef, var)).collect();
            writeln!(out, "r{r}: {} >= {}", lhs.join(" + "), row.rhs).unwrap();
        }
        out.push_str("bounds\n");
        for j in 0..self.num_vars() {
            writeln!(out, "x{j} in [{}, {}]", self.lower[j], self.upper[j]).unwrap();
        }
        out
    }

    pub(crate) fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    pub(crate) fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }
}

/// Solves the LP to proven optimality, or classifies it as infeasible or
/// unbounded.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    simplex::solve_simplex(lp)
}

/// Solves with lazy rows: after each optimal solve every oracle is asked
/// for a violated row and all returned rows are added in one batch; the
/// loop ends when no oracle objects. Errors out after `max_rounds`
/// unsuccessful rounds.
pub fn solve_with_separation(
    lp: &LinearProgram,
    oracles: &[&dyn SeparationOracle],
    max_rounds: usize,
) -> Result<LpSolution> {
    let mut work = lp.clone();
    for _ in 0..max_rounds {
        let solution = solve(&work)?;
        if solution.status != LpStatus::Optimal {
            return Ok(solution);
        }
        let mut clean = true;
        for oracle in oracles {
            if let Some(row) = oracle.separate(&solution.values) {
                work.add_row(row);
                clean = false;
            }
        }
        if clean {
            return Ok(solution);
        }
    }
    Err(Error::CutsDidNotConverge { rounds: max_rounds })
}

/// Variable handles produced by [`encode_truncated_objective`].
#[derive(Debug, Clone)]
pub struct TruncatedEncoding {
    /// The truncation threshold variable `B >= 0`.
    pub threshold_var: usize,
    /// Per-scenario excess variables `t_s >= 0`, index-aligned with the
    /// distribution.
    pub excess_vars: Vec<usize>,
}

/// Installs the truncated objective `B + sum_s p_s (expr_s - B)^+` on an
/// LP whose per-scenario costs are the affine expressions `exprs`.
///
/// Adds `B >= 0` with objective weight one and, per scenario, an excess
/// variable `t_s >= 0` with weight `p_s` and the row
/// `t_s + B - expr_s >= 0` (the expression's constant moves to the
/// right-hand side). At any optimum `t_s = (expr_s - B)^+` since each
/// `t_s` is minimized subject only to its own row.
pub fn encode_truncated_objective(
    lp: &mut LinearProgram,
    exprs: &[LinExpr],
    dist: &ScenarioDistribution,
) -> Result<TruncatedEncoding> {
    if exprs.len() != dist.len() {
        return Err(Error::LengthMismatch(format!(
            "{} cost expressions vs {} scenario probabilities",
            exprs.len(),
            dist.len()
        )));
    }
    let mass = dist.mass();
    if mass < 1.0 - MASS_TOL {
        return Err(Error::MassBelowOne { mass });
    }
    let threshold_var = lp.add_var(1.0, 0.0, f64::INFINITY);
    let mut excess_vars = Vec::with_capacity(exprs.len());
    for (expr, &p) in exprs.iter().zip(dist.probs()) {
        let t = lp.add_var(p, 0.0, f64::INFINITY);
        excess_vars.push(t);
        let mut coeffs = vec![(t, 1.0), (threshold_var, 1.0)];
        for &(var, coef) in &expr.coeffs {
            coeffs.push((var, -coef));
        }
        lp.add_row(Row::ge(coeffs, expr.constant));
    }
    Ok(TruncatedEncoding { threshold_var, excess_vars })
}

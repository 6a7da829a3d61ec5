//! Two-stage uncapacitated facility location. Facility `i` can be opened
//! now for `open1_i` or, after scenario `s` realizes, for `open2_{s,i}`
//! (either may be infinite, meaning that stage is unavailable). Scenario
//! `s` activates the demand clients `demand[s]`, each of which connects
//! to its nearest open facility at metric cost.
//!
//! The relaxation fractionally opens facilities (`x1`, `x2`) and assigns
//! each active client (`z`):
//!
//! ```text
//! sum_i z(s, j, i) >= 1                     every active client is served
//! x1(i) + x2(s, i) >= z(s, j, i)            only open facilities serve
//! cost_s = sum_i open1_i x1(i) + open2_{s,i} x2(s, i)
//!        + sum_{j active} sum_i c_ij z(s, j, i)
//! ```
//!
//! Rounding filters: client `j`'s ball holds the facilities within twice
//! its fractional connection cost `C_j`, which carry at least half of its
//! assignment mass. Scanning clients by ascending `C_j` and keeping only
//! those with balls disjoint from earlier picks yields cluster centers;
//! each center opens one facility in its ball, first-stage when the
//! first-stage share of its assignment reaches one half, reusing any
//! facility already open in the ball. Per scenario this stays within a
//! constant factor (at most 8) of the fractional scenario cost.

use crate::lp::{self, LinExpr, LinearProgram, LpSolution, LpStatus, Row, TruncatedEncoding};
use crate::objective::ScenarioDistribution;
use crate::{Error, Result};

/// A finite metric space given by its distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    d: Vec<Vec<f64>>,
}

impl Metric {
    pub fn new(d: Vec<Vec<f64>>) -> Result<Self> {
        let n = d.len();
        let mut scale = 0.0f64;
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "metric row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidValue(format!("distance ({i}, {j}) is {v}")));
                }
                scale = scale.max(v);
            }
            if d[i][i] != 0.0 {
                return Err(Error::InvalidInstance(format!("nonzero self-distance at {i}")));
            }
        }
        let tol = 1e-9 * (1.0 + scale);
        for (i, row) in d.iter().enumerate() {
            for (j, &val) in row.iter().enumerate().skip(i + 1) {
                if (val - d[j][i]).abs() > tol {
                    return Err(Error::InvalidInstance(format!(
                        "asymmetric distances between {i} and {j}"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d[i][j] > d[i][k] + d[k][j] + tol {
                        return Err(Error::InvalidInstance(format!(
                            "triangle inequality fails for ({i}, {j}) via {k}"
                        )));
                    }
                }
            }
        }
        Ok(Self { d })
    }

    pub fn from_points(points: &[(f64, f64)]) -> Self {
        let d = points
            .iter()
            .map(|&(x1, y1)| {
                points.iter().map(|&(x2, y2)| (x1 - x2).hypot(y1 - y2)).collect()
            })
            .collect();
        Self { d }
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

/// Opened facilities per stage; `second_stage_open[s]` pairs with
/// scenario `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UflSolution {
    pub first_stage_open: Vec<usize>,
    pub second_stage_open: Vec<Vec<usize>>,
}

impl UflSolution {
    pub fn new(mut first: Vec<usize>, mut second: Vec<Vec<usize>>) -> Self {
        first.sort_unstable();
        first.dedup();
        for set in &mut second {
            set.sort_unstable();
            set.dedup();
        }
        Self { first_stage_open: first, second_stage_open: second }
    }
}

#[derive(Debug, Clone)]
pub struct UflInstance {
    metric: Metric,
    n_facilities: usize,
    n_clients: usize,
    /// `demand[s][j]` says whether client `j` is active in scenario `s`.
    demand: Vec<Vec<bool>>,
    open1: Vec<f64>,
    open2: Vec<Vec<f64>>,
    dist: ScenarioDistribution,
}

fn check_open_cost(label: &str, value: f64) -> Result<()> {
    if value.is_nan() || value < 0.0 {
        return Err(Error::InvalidValue(format!("{label} opening cost {value} is invalid")));
    }
    Ok(())
}

impl UflInstance {
    /// Metric indices `0..n_facilities` are facilities; the clients
    /// follow.
    pub fn new(
        metric: Metric,
        n_facilities: usize,
        demand: Vec<Vec<bool>>,
        open1: Vec<f64>,
        open2: Vec<Vec<f64>>,
        dist: ScenarioDistribution,
    ) -> Result<Self> {
        if n_facilities == 0 || n_facilities > metric.len() {
            return Err(Error::InvalidInstance(format!(
                "{n_facilities} facilities in a metric of {} points",
                metric.len()
            )));
        }
        let n_clients = metric.len() - n_facilities;
        if demand.len() != dist.len() || open2.len() != dist.len() {
            return Err(Error::LengthMismatch(format!(
                "{} demand rows, {} second-stage cost rows, {} scenarios",
                demand.len(),
                open2.len(),
                dist.len()
            )));
        }
        if open1.len() != n_facilities {
            return Err(Error::LengthMismatch(format!(
                "{} first-stage opening costs vs {n_facilities} facilities",
                open1.len()
            )));
        }
        for (i, &f) in open1.iter().enumerate() {
            check_open_cost(&format!("facility {i} first-stage"), f)?;
        }
        for (s, row) in open2.iter().enumerate() {
            if row.len() != n_facilities {
                return Err(Error::LengthMismatch(format!(
                    "scenario {s} has {} opening costs vs {n_facilities} facilities",
                    row.len()
                )));
            }
            for (i, &f) in row.iter().enumerate() {
                check_open_cost(&format!("facility {i} scenario {s}"), f)?;
            }
        }
        for (s, row) in demand.iter().enumerate() {
            if row.len() != n_clients {
                return Err(Error::LengthMismatch(format!(
                    "scenario {s} has {} demand flags vs {n_clients} clients",
                    row.len()
                )));
            }
            let openable = (0..n_facilities)
                .any(|i| open1[i].is_finite() || open2[s][i].is_finite());
            if row.iter().any(|&d| d) && !openable {
                return Err(Error::InfeasibleScenario {
                    scenario: s,
                    reason: "demand exists but no facility can be opened".into(),
                });
            }
        }
        Ok(Self { metric, n_facilities, n_clients, demand, open1, open2, dist })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn n_facilities(&self) -> usize {
        self.n_facilities
    }

    pub fn n_clients(&self) -> usize {
        self.n_clients
    }

    pub fn demand(&self) -> &[Vec<bool>] {
        &self.demand
    }

    pub fn open1(&self) -> &[f64] {
        &self.open1
    }

    pub fn open2(&self) -> &[Vec<f64>] {
        &self.open2
    }

    pub fn dist(&self) -> &ScenarioDistribution {
        &self.dist
    }

    pub fn num_scenarios(&self) -> usize {
        self.dist.len()
    }

    /// Connection cost between facility `i` and client `j`.
    pub fn connection(&self, i: usize, j: usize) -> f64 {
        self.metric.dist(i, self.n_facilities + j)
    }

    fn active_clients(&self, s: usize) -> Vec<usize> {
        (0..self.n_clients).filter(|&j| self.demand[s][j]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct UflLp {
    pub lp: LinearProgram,
    pub x1: Vec<usize>,
    pub x2: Vec<Vec<usize>>,
    /// Assignment variables for each scenario's active clients:
    /// `z[s]` maps client `j` to its per-facility variables.
    pub z: Vec<std::collections::BTreeMap<usize, Vec<usize>>>,
    pub exprs: Vec<LinExpr>,
    pub encoding: TruncatedEncoding,
}

/// An unavailable stage (infinite opening cost) becomes a variable fixed
/// at zero; its objective coefficient is zeroed to keep `inf * 0` out of
/// the arithmetic.
fn opening_var(lp: &mut LinearProgram, cost: f64) -> (usize, f64) {
    if cost.is_finite() {
        (lp.add_var(0.0, 0.0, 1.0), cost)
    } else {
        (lp.add_var(0.0, 0.0, 0.0), 0.0)
    }
}

pub fn ufl_lp(inst: &UflInstance) -> Result<UflLp> {
    let m = inst.num_scenarios();
    let nf = inst.n_facilities;
    let mut lp = LinearProgram::new();

    let mut x1 = Vec::with_capacity(nf);
    let mut f1_coefs = Vec::with_capacity(nf);
    for i in 0..nf {
        let (var, coef) = opening_var(&mut lp, inst.open1[i]);
        x1.push(var);
        f1_coefs.push(coef);
    }
    let mut x2 = Vec::with_capacity(m);
    let mut f2_coefs = Vec::with_capacity(m);
    for s in 0..m {
        let mut row = Vec::with_capacity(nf);
        let mut coefs = Vec::with_capacity(nf);
        for i in 0..nf {
            let (var, coef) = opening_var(&mut lp, inst.open2[s][i]);
            row.push(var);
            coefs.push(coef);
        }
        x2.push(row);
        f2_coefs.push(coefs);
    }

    let mut z = Vec::with_capacity(m);
    let mut exprs = Vec::with_capacity(m);
    for s in 0..m {
        let mut expr = LinExpr::new();
        for i in 0..nf {
            expr.add_term(x1[i], f1_coefs[i]);
            expr.add_term(x2[s][i], f2_coefs[s][i]);
        }
        let mut assignments = std::collections::BTreeMap::new();
        for j in inst.active_clients(s) {
            let vars: Vec<usize> = (0..nf).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
            lp.add_row(Row::ge(vars.iter().map(|&v| (v, 1.0)).collect(), 1.0));
            for (i, &zv) in vars.iter().enumerate() {
                lp.add_row(Row::ge(vec![(x1[i], 1.0), (x2[s][i], 1.0), (zv, -1.0)], 0.0));
                expr.add_term(zv, inst.connection(i, j));
            }
            assignments.insert(j, vars);
        }
        z.push(assignments);
        exprs.push(expr);
    }
    let encoding = lp::encode_truncated_objective(&mut lp, &exprs, &inst.dist)?;
    Ok(UflLp { lp, x1, x2, z, exprs, encoding })
}

/// Filtering-based rounding of a fractional opening/assignment.
pub fn round_ufl(inst: &UflInstance, vars: &UflLp, frac: &LpSolution) -> Result<UflSolution> {
    let nf = inst.n_facilities;
    let mut first: Vec<usize> = Vec::new();
    let mut second: Vec<Vec<usize>> = Vec::with_capacity(inst.num_scenarios());

    for s in 0..inst.num_scenarios() {
        let mut opened_here: Vec<usize> = Vec::new();
        let clients = inst.active_clients(s);
        // Fractional connection cost per active client.
        let mut scored: Vec<(f64, usize)> = clients
            .iter()
            .map(|&j| {
                let zvars = &vars.z[s][&j];
                let c: f64 =
                    (0..nf).map(|i| inst.connection(i, j) * frac.values[zvars[i]]).sum();
                (c, j)
            })
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut center_balls: Vec<Vec<usize>> = Vec::new();
        for &(c_j, j) in &scored {
            let ball: Vec<usize> =
                (0..nf).filter(|&i| inst.connection(i, j) <= 2.0 * c_j + 1e-12).collect();
            if center_balls.iter().any(|b| b.iter().any(|i| ball.contains(i))) {
                continue;
            }
            let zvars = &vars.z[s][&j];
            let first_share: f64 = (0..nf)
                .map(|i| frac.values[vars.x1[i]].min(frac.values[zvars[i]]))
                .sum();
            let prefer_first = first_share >= 0.5 - 1e-9;

            let already_open = |set: &[usize]| ball.iter().any(|i| set.contains(i));
            let cheapest = |costs: &dyn Fn(usize) -> f64| -> Option<usize> {
                ball.iter()
                    .copied()
                    .filter(|&i| costs(i).is_finite())
                    .min_by(|&a, &b| costs(a).total_cmp(&costs(b)).then(a.cmp(&b)))
            };
            let open_first = |target: &mut Vec<usize>| -> bool {
                match cheapest(&|i| inst.open1[i]) {
                    Some(i) => {
                        target.push(i);
                        true
                    }
                    None => false,
                }
            };
            let open_second = |target: &mut Vec<usize>| -> bool {
                match cheapest(&|i| inst.open2[s][i]) {
                    Some(i) => {
                        target.push(i);
                        true
                    }
                    None => false,
                }
            };
            if prefer_first {
                if !already_open(&first)
                    && !open_first(&mut first)
                    && !already_open(&opened_here)
                    && !open_second(&mut opened_here)
                {
                    return Err(Error::InfeasibleScenario {
                        scenario: s,
                        reason: format!("no openable facility near client {j}"),
                    });
                }
            } else if !already_open(&opened_here)
                && !open_second(&mut opened_here)
                && !already_open(&first)
                && !open_first(&mut first)
            {
                return Err(Error::InfeasibleScenario {
                    scenario: s,
                    reason: format!("no openable facility near client {j}"),
                });
            }
            center_balls.push(ball);
        }
        second.push(opened_here);
    }

    // A solution must open something even when no scenario has demand.
    if first.is_empty() && second.iter().all(|s| s.is_empty()) {
        let cheapest_first = (0..nf)
            .filter(|&i| inst.open1[i].is_finite())
            .min_by(|&a, &b| inst.open1[a].total_cmp(&inst.open1[b]));
        match cheapest_first {
            Some(i) => first.push(i),
            None => {
                let (s, i) = (0..inst.num_scenarios())
                    .flat_map(|s| (0..nf).map(move |i| (s, i)))
                    .filter(|&(s, i)| inst.open2[s][i].is_finite())
                    .min_by(|&(s1, i1), &(s2, i2)| {
                        inst.open2[s1][i1].total_cmp(&inst.open2[s2][i2])
                    })
                    .ok_or_else(|| {
                        Error::InvalidInstance("no facility can be opened at all".into())
                    })?;
                second[s].push(i);
            }
        }
    }
    Ok(UflSolution::new(first, second))
}

#[derive(Debug, Clone)]
pub struct UflRun {
    pub solution: UflSolution,
    pub costs: Vec<f64>,
    pub lp_objective: f64,
    pub fractional_costs: Vec<f64>,
}

pub fn solve_ufl(inst: &UflInstance) -> Result<UflRun> {
    let vars = ufl_lp(inst)?;
    let sol = lp::solve(&vars.lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::InvalidInstance(
            "facility relaxation should always be optimal".into(),
        ));
    }
    let solution = round_ufl(inst, &vars, &sol)?;
    let costs = evaluate_ufl(inst, &solution)?;
    let fractional_costs = vars.exprs.iter().map(|ex| ex.value(&sol.values)).collect();
    Ok(UflRun { solution, costs, lp_objective: sol.objective_value, fractional_costs })
}

/// Per-scenario cost of a solution: opening costs of both stages plus
/// each active client's distance to its nearest open facility.
pub fn evaluate_ufl(inst: &UflInstance, sol: &UflSolution) -> Result<Vec<f64>> {
    if sol.second_stage_open.len() != inst.num_scenarios() {
        return Err(Error::LengthMismatch(format!(
            "{} second-stage sets vs {} scenarios",
            sol.second_stage_open.len(),
            inst.num_scenarios()
        )));
    }
    if sol.first_stage_open.is_empty()
        && sol.second_stage_open.iter().all(|s| s.is_empty())
    {
        return Err(Error::InvalidInstance("solution opens no facility".into()));
    }
    for &i in &sol.first_stage_open {
        if i >= inst.n_facilities {
            return Err(Error::InvalidInstance(format!("facility id {i} out of range")));
        }
        if !inst.open1[i].is_finite() {
            return Err(Error::InvalidInstance(format!(
                "facility {i} cannot be opened in the first stage"
            )));
        }
    }
    let first_cost: f64 = sol.first_stage_open.iter().map(|&i| inst.open1[i]).sum();
    let mut out = Vec::with_capacity(inst.num_scenarios());
    for (s, opened) in sol.second_stage_open.iter().enumerate() {
        for &i in opened {
            if i >= inst.n_facilities {
                return Err(Error::InvalidInstance(format!("facility id {i} out of range")));
            }
            if !inst.open2[s][i].is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "facility {i} cannot be opened in scenario {s}"
                )));
            }
        }
        let mut cost = first_cost + opened.iter().map(|&i| inst.open2[s][i]).sum::<f64>();
        let available: Vec<usize> =
            sol.first_stage_open.iter().chain(opened).copied().collect();
        for j in inst.active_clients(s) {
            let nearest = available
                .iter()
                .map(|&i| inst.connection(i, j))
                .fold(f64::INFINITY, f64::min);
            if nearest.is_infinite() {
                return Err(Error::InfeasibleScenario {
                    scenario: s,
                    reason: format!("client {j} has no open facility"),
                });
            }
            cost += nearest;
        }
        out.push(cost);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dist(probs: &[f64]) -> ScenarioDistribution {
        ScenarioDistribution::new(probs.to_vec()).unwrap()
    }

    /// One facility at the origin, clients on a line to its right.
    fn line_instance(
        open1: Vec<f64>,
        open2: Vec<Vec<f64>>,
        demand: Vec<Vec<bool>>,
        probs: &[f64],
    ) -> UflInstance {
        let nf = open1.len();
        let nc = demand[0].len();
        let points: Vec<(f64, f64)> = (0..nf)
            .map(|i| (-(i as f64), 0.0))
            .chain((0..nc).map(|j| (1.0 + j as f64, 0.0)))
            .collect();
        UflInstance::new(Metric::from_points(&points), nf, demand, open1, open2, dist(probs))
            .unwrap()
    }

    #[test]
    fn metric_validation_catches_violations() {
        assert!(Metric::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
        // Asymmetry.
        assert!(Metric::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        // Triangle violation: d(0,2) = 5 > 1 + 1.
        let bad = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        assert!(Metric::new(bad).is_err());
        assert!(Metric::new(vec![vec![1.0]]).is_err());
    }

    #[test]
    fn buying_early_wins_when_cheaper() {
        let inst = line_instance(
            vec![1.0],
            vec![vec![10.0]],
            vec![vec![true]],
            &[1.0],
        );
        let run = solve_ufl(&inst).unwrap();
        assert_eq!(run.solution.first_stage_open, vec![0]);
        assert!(run.solution.second_stage_open[0].is_empty());
        // Opening cost 1 plus connection distance 1.
        assert_eq!(run.costs, vec![2.0]);
    }

    #[test]
    fn unavailable_first_stage_defers() {
        let inst = line_instance(
            vec![f64::INFINITY],
            vec![vec![2.0]],
            vec![vec![true]],
            &[1.0],
        );
        let run = solve_ufl(&inst).unwrap();
        assert!(run.solution.first_stage_open.is_empty());
        assert_eq!(run.solution.second_stage_open, vec![vec![0]]);
        assert_eq!(run.costs, vec![3.0]);
    }

    #[test]
    fn unavailable_second_stage_forces_buying() {
        let inst = line_instance(
            vec![4.0],
            vec![vec![f64::INFINITY]],
            vec![vec![true]],
            &[1.0],
        );
        let run = solve_ufl(&inst).unwrap();
        assert_eq!(run.solution.first_stage_open, vec![0]);
        assert_eq!(run.costs, vec![5.0]);
    }

    #[test]
    fn all_unavailable_with_demand_is_rejected() {
        let points = vec![(0.0, 0.0), (1.0, 0.0)];
        let err = UflInstance::new(
            Metric::from_points(&points),
            1,
            vec![vec![true]],
            vec![f64::INFINITY],
            vec![vec![f64::INFINITY]],
            dist(&[1.0]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InfeasibleScenario { scenario: 0, .. }));
    }

    #[test]
    fn no_demand_still_opens_something() {
        let inst = line_instance(
            vec![3.0, 1.0],
            vec![vec![5.0, 5.0]],
            vec![vec![false, false]],
            &[1.0],
        );
        let run = solve_ufl(&inst).unwrap();
        assert_eq!(run.solution.first_stage_open, vec![1]);
        assert_eq!(run.costs, vec![1.0]);
    }

    #[test]
    fn evaluate_sums_openings_and_connections() {
        let inst = line_instance(
            vec![2.0, 7.0],
            vec![vec![1.0, 1.0], vec![3.0, f64::INFINITY]],
            vec![vec![true, false], vec![true, true]],
            &[0.5, 1.0],
        );
        let sol = UflSolution::new(vec![0], vec![vec![], vec![0]]);
        // Facility 0 sits at the origin; clients at 1 and 2.
        let costs = evaluate_ufl(&inst, &sol).unwrap();
        assert_eq!(costs, vec![2.0 + 1.0, 2.0 + 3.0 + 1.0 + 2.0]);
        let bad = UflSolution::new(vec![], vec![vec![], vec![]]);
        assert!(evaluate_ufl(&inst, &bad).is_err());
        let closed = UflSolution::new(vec![1], vec![vec![], vec![1]]);
        assert!(matches!(
            evaluate_ufl(&inst, &closed).unwrap_err(),
            Error::InvalidInstance(_)
        ));
    }

    #[test]
    fn rounded_cost_within_factor_eight_of_fractional() {
        let mut rng = StdRng::seed_from_u64(99);
        for case in 0..12 {
            let nf = rng.gen_range(2..=4);
            let nc = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=3);
            let points: Vec<(f64, f64)> = (0..nf + nc)
                .map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
                .collect();
            let open1: Vec<f64> = (0..nf)
                .map(|i| {
                    if i > 0 && rng.gen_bool(0.2) {
                        f64::INFINITY
                    } else {
                        rng.gen_range(0.5..8.0)
                    }
                })
                .collect();
            let open2: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    (0..nf)
                        .map(|_| {
                            if rng.gen_bool(0.2) {
                                f64::INFINITY
                            } else {
                                rng.gen_range(0.5..12.0)
                            }
                        })
                        .collect()
                })
                .collect();
            // A demand-free instance has fractional optimum 0, and the
            // forced nonempty opening makes any ratio unbounded, so the
            // ratio corpus always demands at least one client.
            let mut demand: Vec<Vec<bool>> =
                (0..m).map(|_| (0..nc).map(|_| rng.gen_bool(0.7)).collect()).collect();
            demand[0][0] = true;
            let mut probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..=1.0)).collect();
            probs[0] = 1.0;
            let inst = UflInstance::new(
                Metric::from_points(&points),
                nf,
                demand,
                open1,
                open2,
                dist(&probs),
            )
            .unwrap();
            let run = solve_ufl(&inst).unwrap();
            for s in 0..inst.num_scenarios() {
                assert!(
                    run.costs[s] <= 8.0 * run.fractional_costs[s] + 1e-6,
                    "case {case} scenario {s}: rounded {} vs fractional {}",
                    run.costs[s],
                    run.fractional_costs[s]
                );
            }
        }
    }

    #[test]
    fn solving_is_deterministic() {
        let inst = line_instance(
            vec![2.0, 3.0],
            vec![vec![1.0, 4.0], vec![2.0, 2.0]],
            vec![vec![true, true], vec![false, true]],
            &[0.9, 0.8],
        );
        let a = solve_ufl(&inst).unwrap();
        let b = solve_ufl(&inst).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.costs, b.costs);
    }
}

//! Exact rational linear programming.
//!
//! A dense two-phase tableau simplex. Pivoting uses the most negative reduced
//! cost while progress is strict and falls back to Bland's rule after any
//! degenerate pivot, which rules out cycling while keeping the pivot count low
//! on the highly degenerate relaxations this crate builds. No tolerances exist:
//! a value is zero iff it is exactly zero.

use std::fmt;

use crate::model::Sense;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// One sparse row `Σ coeffs · x  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        let l = self.lhs(x);
        match self.relation {
            Relation::Le => l <= self.rhs,
            Relation::Eq => l == self.rhs,
            Relation::Ge => l >= self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<Rational>,
    /// Constant added to every objective value.
    pub objective_offset: Rational,
    pub constraints: Vec<Constraint>,
    /// `(lo, hi)` per variable; `None` is unbounded on that side.
    pub bounds: Vec<(Option<Rational>, Option<Rational>)>,
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        LpProblem {
            num_vars: 0,
            sense,
            objective: Vec::new(),
            objective_offset: Rational::zero(),
            constraints: Vec::new(),
            bounds: Vec::new(),
        }
    }

    /// Adds a variable with bounds `[0, ∞)` and returns its index.
    pub fn add_var(&mut self, cost: Rational) -> usize {
        self.objective.push(cost);
        self.bounds.push((Some(Rational::zero()), None));
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn set_bounds(&mut self, var: usize, lo: Option<Rational>, hi: Option<Rational>) {
        self.bounds[var] = (lo, hi);
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        let dot: Rational = self.objective.iter().zip(x).map(|(c, v)| c * v).sum();
        dot + &self.objective_offset
    }

    /// True iff `x` meets every row and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && self.constraints.iter().all(|c| c.is_satisfied(x))
            && self.bounds.iter().zip(x).all(|((lo, hi), v)| {
                lo.as_ref().map_or(true, |l| v >= l) && hi.as_ref().map_or(true, |h| v <= h)
            })
    }

    fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return Err(LpError::Malformed("objective or bounds length differs from num_vars".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some((j, _)) = c.coeffs.iter().find(|(j, _)| *j >= self.num_vars) {
                return Err(LpError::Malformed(format!("row {i} references variable {j}")));
            }
        }
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(h)) = (lo, hi) {
                if l > h {
                    return Err(LpError::Malformed(format!("variable {j} has lo > hi")));
                }
            }
        }
        Ok(())
    }
}

/// Text dump in a CPLEX-LP-like layout, one row per line. Handy when debugging a relaxation.
impl fmt::Display for LpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |f: &mut fmt::Formatter<'_>, j: usize, a: &Rational| write!(f, " + {a} x{j}");
        writeln!(f, "{}", if self.sense == Sense::Minimize { "minimize" } else { "maximize" })?;
        write!(f, " obj: {}", self.objective_offset)?;
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                term(f, j, c)?;
            }
        }
        writeln!(f, "\nsubject to")?;
        for (i, c) in self.constraints.iter().enumerate() {
            write!(f, " r{i}:")?;
            for (j, a) in &c.coeffs {
                term(f, *j, a)?;
            }
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            writeln!(f, " {rel} {}", c.rhs)?;
        }
        writeln!(f, "bounds")?;
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            let lo = lo.as_ref().map_or("-inf".to_string(), |l| l.to_string());
            let hi = hi.as_ref().map_or("inf".to_string(), |h| h.to_string());
            writeln!(f, " {lo} <= x{j} <= {hi}")?;
        }
        write!(f, "end")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// What a basic column of the internal standard form stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisColumn {
    /// Shifted copy of original variable `j` (or its positive part when free).
    Var(usize),
    /// Negative part of free variable `j`.
    VarNeg(usize),
    /// Slack of the upper bound row of variable `j`.
    BoundSlack(usize),
    /// Slack or surplus of constraint `i`.
    Slack(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per original variable; empty unless optimal.
    pub values: Vec<Rational>,
    /// Exact objective including the offset; zero unless optimal.
    pub objective: Rational,
    /// Basic columns at the returned vertex, sorted.
    pub basis: Vec<BasisColumn>,
    pub pivots: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("separation did not converge within {rounds} rounds")]
    RoundBudgetExhausted { last: Box<LpSolution>, rounds: usize },
    #[error("separation oracle returned a row the candidate already satisfies")]
    OracleRowNotViolated,
}

/// How a variable of the original problem maps to standard-form columns.
#[derive(Debug, Clone)]
enum VarMap {
    /// `x = offset + sign · col`
    Shifted { col: usize, offset: Rational, negate: bool },
    /// `x = pos − neg`
    Free { pos: usize, neg: usize },
}

struct Tableau {
    /// `m` rows of `ncols + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs, last entry is minus the current objective.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    pivots: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        self.rows[i].last().expect("row has rhs")
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.rows[r].len();
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            let inv = p.recip();
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let nz: Vec<usize> = (0..width).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                row[j] -= &f * &prow[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = prow;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Minimizes the objective row over columns `0..allowed`.
    fn run(&mut self, allowed: usize) -> Phase {
        let mut bland = false;
        loop {
            let enter = if bland {
                (0..allowed).find(|&j| self.obj[j].is_negative())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..allowed {
                    if self.obj[j].is_negative() && best.map_or(true, |b| self.obj[j] < self.obj[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = enter else { return Phase::Optimal };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return Phase::Unbounded };
            bland = ratio.is_zero();
            self.pivot(r, c);
        }
    }
}

/// Solves `problem` exactly. Deterministic: the same input always yields the same vertex.
pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.validate()?;

    // Map original variables onto nonnegative standard-form columns.
    let mut maps = Vec::with_capacity(problem.num_vars);
    let mut col_kind: Vec<BasisColumn> = Vec::new();
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for (j, (lo, hi)) in problem.bounds.iter().enumerate() {
        let col = col_kind.len();
        match (lo, hi) {
            (Some(l), h) => {
                col_kind.push(BasisColumn::Var(j));
                if let Some(h) = h {
                    bound_rows.push((j, h - l));
                }
                maps.push(VarMap::Shifted { col, offset: l.clone(), negate: false });
            }
            (None, Some(h)) => {
                col_kind.push(BasisColumn::Var(j));
                maps.push(VarMap::Shifted { col, offset: h.clone(), negate: true });
            }
            (None, None) => {
                col_kind.push(BasisColumn::Var(j));
                col_kind.push(BasisColumn::VarNeg(j));
                maps.push(VarMap::Free { pos: col, neg: col + 1 });
            }
        }
    }

    // Rows in terms of structural columns: (coeffs, relation, rhs, kind of slack).
    let mut rows: Vec<(Vec<(usize, Rational)>, Relation, Rational, BasisColumn)> = Vec::new();
    for (i, c) in problem.constraints.iter().enumerate() {
        let mut dense: std::collections::BTreeMap<usize, Rational> = Default::default();
        let mut rhs = c.rhs.clone();
        for (j, a) in &c.coeffs {
            match &maps[*j] {
                VarMap::Shifted { col, offset, negate } => {
                    rhs -= a * offset;
                    let a = if *negate { -a } else { a.clone() };
                    *dense.entry(*col).or_insert_with(Rational::zero) += a;
                }
                VarMap::Free { pos, neg } => {
                    *dense.entry(*pos).or_insert_with(Rational::zero) += a;
                    *dense.entry(*neg).or_insert_with(Rational::zero) -= a;
                }
            }
        }
        let coeffs = dense.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        rows.push((coeffs, c.relation, rhs, BasisColumn::Slack(i)));
    }
    for (j, cap) in bound_rows {
        let VarMap::Shifted { col, .. } = &maps[j] else { unreachable!() };
        rows.push((vec![(*col, Rational::one())], Relation::Le, cap, BasisColumn::BoundSlack(j)));
    }

    // Normalize rhs >= 0, then lay out slack and artificial columns.
    for row in rows.iter_mut() {
        if row.2.is_negative() {
            for (_, a) in row.0.iter_mut() {
                *a = -&*a;
            }
            row.2 = -&row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let m = rows.len();
    let mut slack_col = vec![None; m];
    for (i, row) in rows.iter().enumerate() {
        if row.1 != Relation::Eq {
            slack_col[i] = Some(col_kind.len());
            col_kind.push(row.3);
        }
    }
    let nreal = col_kind.len();
    let mut art_col = vec![None; m];
    let mut nart = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.1 != Relation::Le {
            art_col[i] = Some(nreal + nart);
            nart += 1;
        }
    }
    let ncols = nreal + nart;

    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        obj: vec![Rational::zero(); ncols + 1],
        basis: vec![0; m],
        pivots: 0,
    };
    for (i, (coeffs, rel, rhs, _)) in rows.iter().enumerate() {
        let mut r = vec![Rational::zero(); ncols + 1];
        for (j, a) in coeffs {
            r[*j] = a.clone();
        }
        if let Some(s) = slack_col[i] {
            r[s] = if *rel == Relation::Le { Rational::one() } else { -Rational::one() };
        }
        r[ncols] = rhs.clone();
        t.basis[i] = match (rel, art_col[i]) {
            (Relation::Le, _) => slack_col[i].expect("Le rows have slacks"),
            (_, Some(a)) => {
                r[a] = Rational::one();
                a
            }
            _ => unreachable!(),
        };
        t.rows.push(r);
    }

    // Phase 1: minimize the sum of artificials.
    if nart > 0 {
        for (i, row) in t.rows.iter().enumerate() {
            if art_col[i].is_some() {
                for j in 0..nreal {
                    if !row[j].is_zero() {
                        t.obj[j] -= &row[j];
                    }
                }
                t.obj[ncols] -= &row[ncols];
            }
        }
        t.run(nreal);
        if !t.obj[ncols].is_zero() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective: Rational::zero(),
                basis: Vec::new(),
                pivots: t.pivots,
            });
        }
        // Drive remaining artificials (all at level zero) out of the basis.
        let mut redundant = Vec::new();
        for i in 0..t.rows.len() {
            if t.basis[i] >= nreal {
                match (0..nreal).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => redundant.push(i),
                }
            }
        }
        for &i in redundant.iter().rev() {
            t.rows.remove(i);
            t.basis.remove(i);
        }
        for row in t.rows.iter_mut() {
            let rhs = row.pop().expect("rhs");
            row.truncate(nreal);
            row.push(rhs);
        }
    }

    // Phase 2 on the real objective, always as a minimization.
    let flip = problem.sense == Sense::Maximize;
    let mut cost = vec![Rational::zero(); nreal];
    for (j, c) in problem.objective.iter().enumerate() {
        let c = if flip { -c } else { c.clone() };
        match &maps[j] {
            VarMap::Shifted { col, negate, .. } => {
                cost[*col] = if *negate { -&c } else { c };
            }
            VarMap::Free { pos, neg } => {
                cost[*neg] = -&c;
                cost[*pos] = c;
            }
        }
    }
    let mut obj = cost.clone();
    obj.push(Rational::zero());
    for (i, row) in t.rows.iter().enumerate() {
        let cb = &cost[t.basis[i]];
        if cb.is_zero() {
            continue;
        }
        for j in 0..=nreal {
            if !row[j].is_zero() {
                obj[j] -= cb * &row[j];
            }
        }
    }
    t.obj = obj;
    let phase = t.run(nreal);
    if let Phase::Unbounded = phase {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective: Rational::zero(),
            basis: Vec::new(),
            pivots: t.pivots,
        });
    }

    let mut col_val = vec![Rational::zero(); nreal];
    for (i, &b) in t.basis.iter().enumerate() {
        col_val[b] = t.rhs(i).clone();
    }
    let values: Vec<Rational> = maps
        .iter()
        .map(|mp| match mp {
            VarMap::Shifted { col, offset, negate } => {
                if *negate {
                    offset - &col_val[*col]
                } else {
                    offset + &col_val[*col]
                }
            }
            VarMap::Free { pos, neg } => &col_val[*pos] - &col_val[*neg],
        })
        .collect();
    let objective = problem.objective_value(&values);
    let mut basis: Vec<BasisColumn> = t.basis.iter().map(|&b| col_kind[b]).collect();
    basis.sort();
    debug_assert!(problem.is_feasible(&values));
    Ok(LpSolution { status: LpStatus::Optimal, values, objective, basis, pivots: t.pivots })
}

/// Supplies violated rows of a constraint family too large to write down.
pub trait SeparationOracle {
    /// `None` when `values` satisfies the whole family, else one violated row.
    fn separate(&mut self, values: &[Rational]) -> Option<Constraint>;
}

impl<F: FnMut(&[Rational]) -> Option<Constraint>> SeparationOracle for F {
    fn separate(&mut self, values: &[Rational]) -> Option<Constraint> {
        self(values)
    }
}

/// Oracle that never finds a violated row.
pub struct NoSeparation;

impl SeparationOracle for NoSeparation {
    fn separate(&mut self, _: &[Rational]) -> Option<Constraint> {
        None
    }
}

/// Cutting-plane loop that appends each returned row to `problem`, so callers keep the cuts.
pub fn solve_with_cuts(
    problem: &mut LpProblem,
    oracle: &mut dyn SeparationOracle,
    max_rounds: usize,
) -> Result<LpSolution, LpError> {
    let mut last = None;
    for _ in 0..=max_rounds {
        let sol = solve(problem)?;
        if !sol.is_optimal() {
            return Ok(sol);
        }
        match oracle.separate(&sol.values) {
            None => return Ok(sol),
            Some(row) => {
                if row.is_satisfied(&sol.values) {
                    return Err(LpError::OracleRowNotViolated);
                }
                problem.constraints.push(row);
            }
        }
        last = Some(sol);
    }
    Err(LpError::RoundBudgetExhausted {
        last: Box::new(last.expect("at least one round ran")),
        rounds: max_rounds,
    })
}

/// Solves `problem` plus every row the oracle produces, leaving the input untouched.
pub fn solve_with_separation(
    problem: &LpProblem,
    oracle: &mut dyn SeparationOracle,
    max_rounds: usize,
) -> Result<LpSolution, LpError> {
    let mut p = problem.clone();
    solve_with_cuts(&mut p, oracle, max_rounds)
}

/// True iff every listed variable is exactly 0 or 1.
pub fn is_integral(solution: &LpSolution, vars: &[usize]) -> bool {
    vars.iter().all(|&j| {
        let v = &solution.values[j];
        v.is_zero() || v.is_one()
    })
}

/// Copy of `problem` restricted to its optimal face `objective = value`.
pub fn optimal_face(problem: &LpProblem, value: &Rational) -> LpProblem {
    let mut face = problem.clone();
    let coeffs = problem
        .objective
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j, c.clone()))
        .collect();
    face.add_constraint(coeffs, Relation::Eq, value - &problem.objective_offset);
    face
}

/// Decides whether the 0/1 point `solution` restricted to `vars` is the only optimum.
///
/// Maximizes the L1 distance to the point over the optimal face. The listed variables
/// must be bounded by `[0, 1]` on the feasible region (explicitly or implied), which is
/// the case for every relaxation in this crate.
pub fn is_unique_integral_optimum(
    problem: &LpProblem,
    solution: &LpSolution,
    vars: &[usize],
    oracle: &mut dyn SeparationOracle,
    max_rounds: usize,
) -> Result<bool, LpError> {
    assert!(is_integral(solution, vars), "uniqueness check needs a 0/1 point");
    let mut face = optimal_face(problem, &solution.objective);
    face.sense = Sense::Maximize;
    face.objective = vec![Rational::zero(); face.num_vars];
    let mut ones = 0i64;
    for &j in vars {
        if solution.values[j].is_one() {
            face.objective[j] = -Rational::one();
            ones += 1;
        } else {
            face.objective[j] = Rational::one();
        }
    }
    face.objective_offset = Rational::from_int(ones);
    let far = solve_with_cuts(&mut face, oracle, max_rounds)?;
    Ok(far.is_optimal() && far.objective.is_zero())
}

/// Re-solves over the optimal face of `problem` with a different objective.
pub fn resolve_on_face(
    problem: &LpProblem,
    value: &Rational,
    objective: Vec<Rational>,
    sense: Sense,
) -> Result<LpSolution, LpError> {
    let mut face = optimal_face(problem, value);
    face.objective = objective;
    face.objective_offset = Rational::zero();
    face.sense = sense;
    solve(&face)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn max_x_under_one() {
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(r(1));
        p.add_constraint(vec![(x, r(1))], Relation::Le, r(1));
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.values, vec![r(1)]);
        assert_eq!(s.objective, r(1));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(r(0));
        p.add_constraint(vec![(x, r(1))], Relation::Ge, r(1));
        p.add_constraint(vec![(x, r(1))], Relation::Le, r(0));
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(r(1));
        let y = p.add_var(r(0));
        p.add_constraint(vec![(x, r(1)), (y, r(-1))], Relation::Le, r(3));
        assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // min 2x + y with x free, x >= -3 via a row, y <= 2 only, x + y >= -4
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(r(2));
        let y = p.add_var(r(1));
        p.set_bounds(x, None, None);
        p.set_bounds(y, None, Some(r(2)));
        p.add_constraint(vec![(x, r(1))], Relation::Ge, r(-3));
        p.add_constraint(vec![(x, r(1)), (y, r(1))], Relation::Ge, r(-4));
        let s = solve(&p).unwrap();
        assert_eq!(s.values, vec![r(-3), r(-1)]);
        assert_eq!(s.objective, r(-7));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(r(1));
        let y = p.add_var(r(1));
        p.add_constraint(vec![(x, r(1)), (y, r(1))], Relation::Eq, r(2));
        p.add_constraint(vec![(x, r(2)), (y, r(2))], Relation::Eq, r(4));
        p.add_constraint(vec![(x, r(1))], Relation::Ge, q(1, 2));
        let s = solve(&p).unwrap();
        assert_eq!(s.objective, r(2));
    }

    #[test]
    fn cycling_example_terminates() {
        // Beale's classic cycling instance under the textbook rule.
        let mut p = LpProblem::new(Sense::Minimize);
        let c = [q(-3, 4), r(20), q(-1, 2), r(6)];
        let v: Vec<usize> = c.iter().map(|c| p.add_var(c.clone())).collect();
        p.add_constraint(
            vec![(v[0], q(1, 4)), (v[1], r(-8)), (v[2], r(-1)), (v[3], r(9))],
            Relation::Le,
            r(0),
        );
        p.add_constraint(
            vec![(v[0], q(1, 2)), (v[1], r(-12)), (v[2], q(-1, 2)), (v[3], r(3))],
            Relation::Le,
            r(0),
        );
        p.add_constraint(vec![(v[2], r(1))], Relation::Le, r(1));
        let s = solve(&p).unwrap();
        assert_eq!(s.objective, q(-5, 4));
    }

    #[test]
    fn separation_with_silent_oracle_matches_solve() {
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(r(2));
        let y = p.add_var(r(3));
        p.add_constraint(vec![(x, r(1)), (y, r(1))], Relation::Le, r(4));
        p.add_constraint(vec![(x, r(1)), (y, r(3))], Relation::Le, r(6));
        let a = solve(&p).unwrap();
        let b = solve_with_separation(&p, &mut NoSeparation, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.objective, r(9));
    }

    #[test]
    fn separation_adds_rows_until_satisfied() {
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(r(1));
        let y = p.add_var(r(1));
        p.set_bounds(x, Some(r(0)), Some(r(1)));
        p.set_bounds(y, Some(r(0)), Some(r(1)));
        let mut oracle = |v: &[Rational]| {
            (&v[0] + &v[1] > r(1)).then(|| Constraint::new(vec![(0, r(1)), (1, r(1))], Relation::Le, r(1)))
        };
        let s = solve_with_separation(&p, &mut oracle, 3).unwrap();
        assert_eq!(s.objective, r(1));
        let mut stubborn = |_: &[Rational]| Some(Constraint::new(vec![(0, r(1))], Relation::Le, r(5)));
        assert_eq!(
            solve_with_separation(&p, &mut stubborn, 3),
            Err(LpError::OracleRowNotViolated)
        );
    }

    #[test]
    fn round_budget_exhaustion_carries_last_candidate() {
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(r(1));
        p.set_bounds(x, Some(r(0)), Some(r(10)));
        let mut shrink = |v: &[Rational]| {
            (v[0] > r(0)).then(|| Constraint::new(vec![(0, r(1))], Relation::Le, &v[0] - r(1)))
        };
        match solve_with_separation(&p, &mut shrink, 2) {
            Err(LpError::RoundBudgetExhausted { last, rounds }) => {
                assert_eq!(rounds, 2);
                assert_eq!(last.values, vec![r(8)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn integrality_predicate() {
        let s = LpSolution {
            status: LpStatus::Optimal,
            values: vec![r(1), r(0), r(1)],
            objective: r(2),
            basis: vec![],
            pivots: 0,
        };
        assert!(is_integral(&s, &[0, 1, 2]));
        let t = LpSolution { values: vec![q(1, 2), r(1)], ..s };
        assert!(!is_integral(&t, &[0, 1]));
    }

    #[test]
    fn uniqueness_detects_ties() {
        // max x + y, x + y <= 1 on the box: optimum not unique.
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(r(1));
        let y = p.add_var(r(1));
        p.set_bounds(x, Some(r(0)), Some(r(1)));
        p.set_bounds(y, Some(r(0)), Some(r(1)));
        p.add_constraint(vec![(x, r(1)), (y, r(1))], Relation::Le, r(1));
        let s = solve(&p).unwrap();
        assert!(!is_unique_integral_optimum(&p, &s, &[0, 1], &mut NoSeparation, 0).unwrap());
        p.objective[1] = q(1, 2);
        let s = solve(&p).unwrap();
        assert!(is_unique_integral_optimum(&p, &s, &[0, 1], &mut NoSeparation, 0).unwrap());
    }

    /// Solves a square system exactly; `None` when singular.
    fn gauss(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).find(|&i| !a[i][c].is_zero())?;
            a.swap(c, p);
            b.swap(c, p);
            for i in 0..n {
                if i != c && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[c][c];
                    for j in c..n {
                        let d = &f * &a[c][j];
                        a[i][j] -= d;
                    }
                    let d = &f * &b[c];
                    b[i] -= d;
                }
            }
        }
        Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
    }

    /// Best vertex over all choices of `n` tight rows among constraints and `x >= 0`.
    fn brute_force_max(p: &LpProblem) -> Option<Rational> {
        let n = p.num_vars;
        let mut planes: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for c in &p.constraints {
            let mut row = vec![Rational::zero(); n];
            for (j, a) in &c.coeffs {
                row[*j] += a;
            }
            planes.push((row, c.rhs.clone()));
        }
        for j in 0..n {
            let mut row = vec![Rational::zero(); n];
            row[j] = Rational::one();
            planes.push((row, Rational::zero()));
        }
        let mut best: Option<Rational> = None;
        let m = planes.len();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let pick: Vec<_> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            let a = pick.iter().map(|&i| planes[i].0.clone()).collect();
            let b = pick.iter().map(|&i| planes[i].1.clone()).collect();
            if let Some(x) = gauss(a, b) {
                if p.is_feasible(&x) {
                    let v = p.objective_value(&x);
                    if best.as_ref().map_or(true, |b| v > *b) {
                        best = Some(v);
                    }
                }
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_vertex_enumeration(
            n in 1usize..4,
            rows in proptest::collection::vec((proptest::collection::vec(0i64..6, 3), 1i64..12), 1..4),
            cost in proptest::collection::vec(-3i64..6, 3),
        ) {
            // Nonnegative rows with positive rhs and a box row keep the polytope bounded.
            let mut p = LpProblem::new(Sense::Maximize);
            for c in cost.iter().take(n) {
                p.add_var(r(*c));
            }
            for (a, b) in &rows {
                p.add_constraint((0..n).map(|j| (j, r(a[j]))).collect(), Relation::Le, r(*b));
            }
            p.add_constraint((0..n).map(|j| (j, r(1))).collect(), Relation::Le, r(10));
            let s = solve(&p).unwrap();
            prop_assert_eq!(s.status, LpStatus::Optimal);
            prop_assert!(p.is_feasible(&s.values));
            prop_assert_eq!(Some(s.objective), brute_force_max(&p));
        }

        #[test]
        fn optimal_values_satisfy_rows_exactly(
            rows in proptest::collection::vec((proptest::collection::vec(-4i64..6, 4), -5i64..12, 0u8..3), 1..6),
            cost in proptest::collection::vec(-5i64..6, 4),
        ) {
            let mut p = LpProblem::new(Sense::Minimize);
            for c in &cost {
                let j = p.add_var(r(*c));
                p.set_bounds(j, Some(r(-3)), Some(r(7)));
            }
            for (a, b, rel) in &rows {
                let rel = [Relation::Le, Relation::Eq, Relation::Ge][*rel as usize];
                p.add_constraint((0..4).map(|j| (j, r(a[j]))).collect(), rel, r(*b));
            }
            let s = solve(&p).unwrap();
            if s.is_optimal() {
                prop_assert!(p.is_feasible(&s.values));
                prop_assert_eq!(p.objective_value(&s.values), s.objective);
            } else {
                prop_assert_eq!(s.status, LpStatus::Infeasible);
            }
        }
    }
}

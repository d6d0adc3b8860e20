//! Dense two-phase simplex over any [`Scalar`].
//!
//! Run on `f64` for interactive work and on [`BigRational`](num_rational::BigRational)
//! or [`QuadSurd`](crate::scalar::QuadSurd) when a verdict has to be exact.
//! Infeasible problems come back with a Farkas certificate that can be
//! checked against the original constraints without trusting the solver.

use std::cmp::Ordering;

use crate::error::{GptError, Result};
use crate::scalar::Scalar;

/// Phase-one objective values at or below this are treated as feasible when
/// running on `f64`.
pub const FLOAT_FEASIBILITY_SLACK: f64 = 1e-9;

const DANTZIG_STALL_LIMIT: usize = 50;
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarDomain {
    NonNeg,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone)]
pub struct LinearConstraint<F> {
    pub coeffs: Vec<F>,
    pub relation: Relation,
    pub rhs: F,
}

#[derive(Debug, Clone)]
pub struct LpProblem<F> {
    pub domains: Vec<VarDomain>,
    pub sense: Sense,
    pub objective: Vec<F>,
    pub constraints: Vec<LinearConstraint<F>>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<F> {
    pub value: F,
    pub x: Vec<F>,
}

/// Multipliers `y`, one per constraint, proving `{constraints}` has no solution:
/// the `y`-weighted combination of the rows is nonpositive on the variable
/// domain while its right-hand side is strictly positive.
#[derive(Debug, Clone)]
pub struct FarkasCertificate<F> {
    pub multipliers: Vec<F>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome<F> {
    Optimal(LpSolution<F>),
    Infeasible(FarkasCertificate<F>),
    Unbounded,
}

impl<F> LpOutcome<F> {
    pub fn optimal(self) -> Option<LpSolution<F>> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible(_))
    }
}

impl<F: Scalar> LpProblem<F> {
    pub fn new(num_vars: usize, domain: VarDomain, sense: Sense) -> Self {
        Self {
            domains: vec![domain; num_vars],
            sense,
            objective: vec![F::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    /// A pure feasibility problem (zero objective).
    pub fn feasibility(num_vars: usize, domain: VarDomain) -> Self {
        Self::new(num_vars, domain, Sense::Minimize)
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn with_objective(mut self, objective: Vec<F>) -> Self {
        self.objective = objective;
        self
    }

    pub fn add(&mut self, coeffs: Vec<F>, relation: Relation, rhs: F) -> Result<()> {
        GptError::check_len(self.num_vars(), coeffs.len())?;
        self.constraints.push(LinearConstraint {
            coeffs,
            relation,
            rhs,
        });
        Ok(())
    }

    pub fn solve(&self) -> Result<LpOutcome<F>> {
        GptError::check_len(self.num_vars(), self.objective.len())?;
        Tableau::build(self).run(self)
    }
}

impl<F: Scalar> FarkasCertificate<F> {
    /// Checks the certificate against `problem` directly from its rows.
    ///
    /// For exact scalars this is a proof of infeasibility; on `f64` the
    /// sign tests use the scalar's pivot tolerance.
    pub fn verify(&self, problem: &LpProblem<F>) -> bool {
        if self.multipliers.len() != problem.constraints.len() {
            return false;
        }
        for (y, c) in self.multipliers.iter().zip(&problem.constraints) {
            let ok = match c.relation {
                Relation::Le => !y.is_positive(),
                Relation::Ge => !y.is_negative(),
                Relation::Eq => true,
            };
            if !ok {
                return false;
            }
        }
        for (j, domain) in problem.domains.iter().enumerate() {
            let col = self
                .multipliers
                .iter()
                .zip(&problem.constraints)
                .fold(F::zero(), |acc, (y, c)| acc + y.clone() * c.coeffs[j].clone());
            let ok = match domain {
                VarDomain::NonNeg => !col.is_positive(),
                VarDomain::Free => col.is_zero(),
            };
            if !ok {
                return false;
            }
        }
        let rhs = self
            .multipliers
            .iter()
            .zip(&problem.constraints)
            .fold(F::zero(), |acc, (y, c)| acc + y.clone() * c.rhs.clone());
        rhs.is_positive()
    }
}

/// Column layout of the standardized problem.
#[derive(Debug, Clone, Copy)]
enum Column {
    Plus(usize),
    Minus(usize),
    Slack,
    Artificial(usize),
}

struct Tableau<F> {
    rows: Vec<Vec<F>>,
    basis: Vec<usize>,
    columns: Vec<Column>,
    row_sign: Vec<bool>,
    // reduced costs, last entry holds minus the objective value
    cost_row: Vec<F>,
}

impl<F: Scalar> Tableau<F> {
    fn build(problem: &LpProblem<F>) -> Self {
        let mut columns = Vec::new();
        for (j, d) in problem.domains.iter().enumerate() {
            columns.push(Column::Plus(j));
            if *d == VarDomain::Free {
                columns.push(Column::Minus(j));
            }
        }
        let structural = columns.len();
        let slack_rows: Vec<usize> = problem
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.relation != Relation::Eq)
            .map(|(i, _)| i)
            .collect();
        columns.extend(slack_rows.iter().map(|_| Column::Slack));
        let m = problem.constraints.len();
        columns.extend((0..m).map(Column::Artificial));
        let width = columns.len() + 1;

        let mut rows = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for (i, c) in problem.constraints.iter().enumerate() {
            let mut row = vec![F::zero(); width];
            let mut col = 0;
            for (j, d) in problem.domains.iter().enumerate() {
                row[col] = c.coeffs[j].clone();
                col += 1;
                if *d == VarDomain::Free {
                    row[col] = -c.coeffs[j].clone();
                    col += 1;
                }
            }
            if let Some(k) = slack_rows.iter().position(|&r| r == i) {
                row[structural + k] = match c.relation {
                    Relation::Le => F::one(),
                    _ => -F::one(),
                };
            }
            row[width - 1] = c.rhs.clone();
            let flip = c.rhs.is_negative();
            if flip {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            row[structural + slack_rows.len() + i] = F::one();
            rows.push(row);
            row_sign.push(flip);
        }
        let first_artificial = structural + slack_rows.len();
        let basis = (0..m).map(|i| first_artificial + i).collect();

        // phase-one costs: 1 on artificials
        let mut cost_row = vec![F::zero(); width];
        for row in &rows {
            for (j, v) in row.iter().enumerate() {
                if j < first_artificial || j == width - 1 {
                    cost_row[j] = cost_row[j].clone() - v.clone();
                }
            }
        }
        Self {
            rows,
            basis,
            columns,
            row_sign,
            cost_row,
        }
    }

    fn width(&self) -> usize {
        self.columns.len() + 1
    }

    fn is_artificial(&self, j: usize) -> bool {
        matches!(self.columns[j], Column::Artificial(_))
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<F>| {
            let factor = row[c].clone();
            if factor == F::zero() {
                return;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if *pv != F::zero() {
                    *v = v.clone() - factor.clone() * pv.clone();
                }
            }
            row[c] = F::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost_row);
        self.basis[r] = c;
    }

    /// Minimizes the objective encoded in `cost_row`; columns failing
    /// `allowed` never enter. Returns `false` when unbounded.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<bool> {
        let rhs = self.width() - 1;
        let mut bland = false;
        let mut stall = 0;
        let mut last_value = self.cost_row[rhs].clone();
        for _ in 0..MAX_PIVOTS {
            let entering = if bland {
                (0..rhs).find(|&j| allowed(j) && self.cost_row[j].is_negative())
            } else {
                (0..rhs)
                    .filter(|&j| allowed(j) && self.cost_row[j].is_negative())
                    .min_by(|&a, &b| self.cost_row[a].cmp_scalar(&self.cost_row[b]))
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leaving: Option<usize> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_positive() {
                    continue;
                }
                leaving = Some(match leaving {
                    None => i,
                    Some(best) => {
                        let lhs = self.rows[i][rhs].clone() * self.rows[best][c].clone();
                        let rhs_v = self.rows[best][rhs].clone() * self.rows[i][c].clone();
                        match lhs.cmp_scalar(&rhs_v) {
                            Ordering::Less => i,
                            Ordering::Equal if self.basis[i] < self.basis[best] => i,
                            _ => best,
                        }
                    }
                });
            }
            let Some(r) = leaving else {
                return Ok(false);
            };
            self.pivot(r, c);
            let value = self.cost_row[rhs].clone();
            if value.cmp_scalar(&last_value) == Ordering::Equal {
                stall += 1;
                if stall > DANTZIG_STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
            }
            last_value = value;
        }
        Err(GptError::Internal("simplex pivot limit reached".into()))
    }

    fn run(mut self, problem: &LpProblem<F>) -> Result<LpOutcome<F>> {
        let rhs = self.width() - 1;
        let not_artificial: Vec<bool> = (0..rhs).map(|j| !self.is_artificial(j)).collect();
        let bounded = self.optimize(&|j| not_artificial[j])?;
        if !bounded {
            return Err(GptError::Internal("phase one unbounded".into()));
        }
        let infeasibility = -self.cost_row[rhs].clone();
        let infeasible = if F::EXACT {
            infeasibility.is_positive()
        } else {
            infeasibility.to_f64() > FLOAT_FEASIBILITY_SLACK
        };
        if infeasible {
            // simplex multipliers: reduced cost of artificial i is 1 - y_i
            let mut multipliers = vec![F::zero(); problem.constraints.len()];
            for (j, col) in self.columns.iter().enumerate() {
                if let Column::Artificial(i) = col {
                    let y = F::one() - self.cost_row[j].clone();
                    multipliers[*i] = if self.row_sign[*i] { -y } else { y };
                }
            }
            return Ok(LpOutcome::Infeasible(FarkasCertificate { multipliers }));
        }

        // drive zero-level artificials out of the basis where possible
        for r in 0..self.rows.len() {
            if self.is_artificial(self.basis[r]) {
                if let Some(c) = (0..rhs).find(|&j| !self.is_artificial(j) && !self.rows[r][j].is_zero())
                {
                    self.pivot(r, c);
                }
            }
        }

        // phase two
        let mut costs = vec![F::zero(); rhs];
        for (j, col) in self.columns.iter().enumerate() {
            let c = match col {
                Column::Plus(v) => problem.objective[*v].clone(),
                Column::Minus(v) => -problem.objective[*v].clone(),
                _ => F::zero(),
            };
            costs[j] = match problem.sense {
                Sense::Minimize => c,
                Sense::Maximize => -c,
            };
        }
        let mut cost_row: Vec<F> = costs.iter().cloned().chain([F::zero()]).collect();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = costs[self.basis[i]].clone();
            if cb == F::zero() {
                continue;
            }
            for (j, v) in row.iter().enumerate() {
                cost_row[j] = cost_row[j].clone() - cb.clone() * v.clone();
            }
        }
        self.cost_row = cost_row;
        if !self.optimize(&|j| not_artificial[j])? {
            return Ok(LpOutcome::Unbounded);
        }

        let mut x = vec![F::zero(); problem.num_vars()];
        for (i, &b) in self.basis.iter().enumerate() {
            let v = self.rows[i][rhs].clone();
            match self.columns[b] {
                Column::Plus(j) => x[j] = x[j].clone() + v,
                Column::Minus(j) => x[j] = x[j].clone() - v,
                _ => {}
            }
        }
        let value = problem
            .objective
            .iter()
            .zip(&x)
            .fold(F::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
        Ok(LpOutcome::Optimal(LpSolution { value, x }))
    }
}

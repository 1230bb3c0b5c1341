//! Exact-rational linear programming.
//!
//! A small dense simplex solver (Bland's rule, two phases) over arbitrary
//! precision rationals. Every `Optimal` result carries both a primal and a
//! dual certificate and is re-verified internally before being returned:
//! primal feasibility, dual feasibility, strong duality and complementary
//! slackness all hold as exact equalities, or the solve fails loudly.
//!
//! Exponential constraint families are handled by [`solve_with_separation`],
//! which alternates relaxation solves with separation-oracle cuts.

mod separation;
mod simplex;

pub use separation::{check_oracle_feasibility, solve_with_separation, SeparationOracle, SeparationResult};

use crate::rational::Rational;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("separation oracle returned a constraint that the candidate does not violate")]
    OracleContractViolation,
    #[error("round limit of {0} exceeded in constraint generation")]
    RoundLimitExceeded(usize),
    #[error("relaxation is unbounded; seed the base LP with bounding constraints")]
    RelaxationUnbounded,
    #[error("internal solver error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// Bounded below by zero.
    NonNeg,
    /// Unrestricted in sign; lowered to a difference of two nonnegative
    /// variables inside the solver.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
struct Variable {
    name: String,
    kind: VarKind,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    /// Sparse coefficients `(variable, coefficient)`; duplicates are merged.
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// An LP model over named variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, Rational)>,
    sense: Sense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve. `primal`, `duals` and `objective` are populated only
/// when `status == Optimal`; `duals` has one entry per constraint.
///
/// Dual sign convention, per constraint relation:
/// for a maximization, `<=` rows have duals `>= 0`, `>=` rows have duals
/// `<= 0`, equality rows are free; for a minimization the inequality signs
/// swap. In either case `sum_i dual_i * rhs_i == objective`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<Rational>,
    pub duals: Vec<Rational>,
    pub objective: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    /// Constraint `index` fails; `slack` is negative by the amount of the
    /// violation (for equalities, the signed residual `rhs - lhs`).
    ViolatedConstraint { index: usize, slack: Rational },
    ViolatedBound { var: usize, value: Rational },
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram { vars: Vec::new(), constraints: Vec::new(), objective: Vec::new(), sense }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind) -> usize {
        self.vars.push(Variable { name: name.into(), kind });
        self.vars.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<usize, LpError> {
        let merged = self.merge_coeffs(coeffs)?;
        self.constraints.push(Constraint { coeffs: merged, relation, rhs });
        Ok(self.constraints.len() - 1)
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, Rational)>) -> Result<(), LpError> {
        self.objective = self.merge_coeffs(coeffs)?;
        Ok(())
    }

    fn merge_coeffs(&self, coeffs: Vec<(usize, Rational)>) -> Result<Vec<(usize, Rational)>, LpError> {
        let mut dense: std::collections::BTreeMap<usize, Rational> = Default::default();
        for (j, c) in coeffs {
            if j >= self.vars.len() {
                return Err(LpError::MalformedModel(format!(
                    "coefficient references variable {j}, model has {}",
                    self.vars.len()
                )));
            }
            *dense.entry(j).or_insert_with(Rational::zero) += c;
        }
        Ok(dense.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_name(&self, j: usize) -> &str {
        &self.vars[j].name
    }

    pub fn var_kind(&self, j: usize) -> VarKind {
        self.vars[j].kind
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraint(&self, i: usize) -> &Constraint {
        &self.constraints[i]
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective_coeffs(&self) -> &[(usize, Rational)] {
        &self.objective
    }

    pub fn objective_value(&self, point: &[Rational]) -> Rational {
        self.objective.iter().map(|(j, c)| c * &point[*j]).sum()
    }

    /// Solves the model exactly, returning status plus primal and dual
    /// certificates (internally verified).
    pub fn solve(&self) -> Result<LpSolution, LpError> {
        simplex::solve(self)
    }

    /// Exact constraint-by-constraint check of `point`.
    pub fn check_feasibility(&self, point: &[Rational]) -> Result<Feasibility, LpError> {
        if point.len() != self.vars.len() {
            return Err(LpError::DimensionMismatch { expected: self.vars.len(), got: point.len() });
        }
        for (j, var) in self.vars.iter().enumerate() {
            if var.kind == VarKind::NonNeg && point[j] < Rational::zero() {
                return Ok(Feasibility::ViolatedBound { var: j, value: point[j].clone() });
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            let lhs: Rational = con.coeffs.iter().map(|(j, c)| c * &point[*j]).sum();
            let ok = match con.relation {
                Relation::Le => lhs <= con.rhs,
                Relation::Eq => lhs == con.rhs,
                Relation::Ge => lhs >= con.rhs,
            };
            if !ok {
                let slack = match con.relation {
                    Relation::Le | Relation::Eq => &con.rhs - &lhs,
                    Relation::Ge => &lhs - &con.rhs,
                };
                return Ok(Feasibility::ViolatedConstraint { index: i, slack });
            }
        }
        Ok(Feasibility::Feasible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn feasibility_check_examples() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x", VarKind::NonNeg);
        lp.add_constraint(vec![(x, rat(1))], Relation::Le, rat(3)).unwrap();
        lp.set_objective(vec![(x, rat(1))]).unwrap();

        // Tight is feasible.
        assert_eq!(lp.check_feasibility(&[rat(3)]).unwrap(), Feasibility::Feasible);
        // One over is violated with slack -1.
        assert_eq!(
            lp.check_feasibility(&[rat(4)]).unwrap(),
            Feasibility::ViolatedConstraint { index: 0, slack: rat(-1) }
        );
        assert!(matches!(
            lp.check_feasibility(&[rat(-1)]).unwrap(),
            Feasibility::ViolatedBound { var: 0, .. }
        ));
        assert_eq!(
            lp.check_feasibility(&[]).unwrap_err(),
            LpError::DimensionMismatch { expected: 1, got: 0 }
        );
    }

    #[test]
    fn bad_variable_index_rejected() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let e = lp.add_constraint(vec![(3, rat(1))], Relation::Le, rat(0)).unwrap_err();
        assert!(matches!(e, LpError::MalformedModel(_)));
    }
}

//! Constraint generation against a separation oracle.
//!
//! Exponential constraint families (the branching game's cut constraints)
//! are never materialized. The relaxation is solved, the oracle is asked to
//! separate the optimum, and any violated constraint is added until the
//! oracle accepts. With exact arithmetic and finitely many candidate
//! constraints this terminates at the true optimum.



use super::{Constraint, Feasibility, LinearProgram, LpError, LpSolution, LpStatus, Relation};
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub enum SeparationResult {
    /// The candidate satisfies every constraint the oracle represents.
    Feasible,
    /// One violated constraint to add to the relaxation.
    Violated(Constraint),
}

/// A procedure that, given a candidate point, certifies feasibility or
/// exhibits one violated constraint.
pub trait SeparationOracle {
    fn separate(&mut self, point: &[Rational]) -> Result<SeparationResult, LpError>;
}

impl<F> SeparationOracle for F
where
    F: FnMut(&[Rational]) -> Result<SeparationResult, LpError>,
{
    fn separate(&mut self, point: &[Rational]) -> Result<SeparationResult, LpError> {
        self(point)
    }
}

/// Default round guard: generous, finite, proportional to model size.
pub(crate) fn default_max_rounds(lp: &LinearProgram) -> usize {
    10 * (lp.var_count() + lp.constraint_count()).max(10)
}

/// Solves `base` subject to the additional constraints represented by
/// `oracle`. Returns the final relaxation's solution once the oracle accepts
/// its optimum; the returned point satisfies every oracle constraint.
///
/// Cuts returned by the oracle are checked to actually be violated by the
/// candidate point (`OracleContractViolation` otherwise). Infeasible and
/// unbounded relaxations end the loop immediately: an unbounded relaxation
/// means the base LP lacks bounding constraints, which the caller must fix.
pub fn solve_with_separation(
    base: &LinearProgram,
    oracle: &mut dyn SeparationOracle,
    max_rounds: Option<usize>,
) -> Result<LpSolution, LpError> {
    let limit = max_rounds.unwrap_or_else(|| default_max_rounds(base));
    let mut lp = base.clone();
    for _ in 0..limit {
        let sol = lp.solve()?;
        match sol.status {
            LpStatus::Infeasible => return Ok(sol),
            LpStatus::Unbounded => return Err(LpError::RelaxationUnbounded),
            LpStatus::Optimal => {}
        }
        match oracle.separate(&sol.primal)? {
            SeparationResult::Feasible => {
                return Ok(sol);
            }
            SeparationResult::Violated(cut) => {
                let lhs: Rational = cut.coeffs.iter().map(|(j, c)| c * &sol.primal[*j]).sum();
                let violated = match cut.relation {
                    Relation::Le => lhs > cut.rhs,
                    Relation::Eq => lhs != cut.rhs,
                    Relation::Ge => lhs < cut.rhs,
                };
                if !violated {
                    return Err(LpError::OracleContractViolation);
                }
                lp.add_constraint(cut.coeffs, cut.relation, cut.rhs)?;
            }
        }
    }
    Err(LpError::RoundLimitExceeded(limit))
}

/// Verifies that `point` satisfies both the base LP and the oracle.
pub fn check_oracle_feasibility(
    base: &LinearProgram,
    oracle: &mut dyn SeparationOracle,
    point: &[Rational],
) -> Result<Feasibility, LpError> {
    let base_check = base.check_feasibility(point)?;
    if base_check != Feasibility::Feasible {
        return Ok(base_check);
    }
    match oracle.separate(point)? {
        SeparationResult::Feasible => Ok(Feasibility::Feasible),
        SeparationResult::Violated(cut) => {
            let lhs: Rational = cut.coeffs.iter().map(|(j, c)| c * &point[*j]).sum();
            let slack = match cut.relation {
                Relation::Le | Relation::Eq => &cut.rhs - &lhs,
                Relation::Ge => &lhs - &cut.rhs,
            };
            Ok(Feasibility::ViolatedConstraint { index: base.constraint_count(), slack })
        }
    }
}

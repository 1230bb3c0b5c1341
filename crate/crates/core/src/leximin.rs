//! Iterative leximin/leximax optimization over the optimal face of an LP.
//!
//! The engine first solves the base LP and pins its objective to the exact
//! optimum, restricting everything that follows to the optimal face. It then
//! repeats: maximize a floor `alpha` under all unfixed tracked shares, read
//! the duals of the share rows, and permanently fix every share with a
//! positive dual at `alpha` — complementary slackness forces those shares to
//! equal `alpha` in every optimum, and the dual normalization guarantees at
//! least one share fixes per round. The fixed values form the unique leximin
//! point of the tracked shares over the face. Leximax mirrors the procedure
//! with a shrinking ceiling.
//!
//! Tracked shares are linear expressions over LP variables rather than raw
//! variables, so one engine serves profit shares of the form
//! `capacity * length` as well as per-agent sums.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lp::{
    solve_with_separation, Constraint, LinearProgram, LpError, LpSolution, LpStatus, Relation,
    Sense, SeparationOracle, SeparationResult, VarKind,
};
use crate::rational::{rat, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeximinError {
    #[error("base LP is infeasible")]
    InfeasibleBase,
    #[error("base LP is unbounded")]
    UnboundedBase,
    #[error("no unfixed share had a positive dual; the dual normalization makes this impossible")]
    NoPositiveDual,
    #[error("floor LP unexpectedly {0:?}")]
    BadFloorStatus(LpStatus),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// A tracked share: a labeled linear expression over the LP variables.
#[derive(Debug, Clone)]
pub struct TrackedShare {
    pub label: String,
    pub expr: Vec<(usize, Rational)>,
}

impl TrackedShare {
    pub fn of_var(label: impl Into<String>, var: usize) -> Self {
        TrackedShare { label: label.into(), expr: vec![(var, rat(1))] }
    }

    pub fn scaled_var(label: impl Into<String>, var: usize, scale: Rational) -> Self {
        TrackedShare { label: label.into(), expr: vec![(var, scale)] }
    }

    pub fn value(&self, point: &[Rational]) -> Rational {
        self.expr.iter().map(|(j, c)| c * &point[*j]).sum()
    }
}

#[derive(Debug, Clone)]
pub struct LeximinProblem {
    pub base: LinearProgram,
    pub tracked: Vec<TrackedShare>,
}

/// One fixing round: the floor/ceiling value, the share duals read off the
/// LP, and which shares got fixed.
#[derive(Debug, Clone)]
pub struct LeximinRound {
    pub alpha: Rational,
    pub fixed: Vec<usize>,
    pub duals: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct LeximinResult {
    /// Final share per tracked id.
    pub shares: Vec<Rational>,
    pub rounds: Vec<LeximinRound>,
    /// Optimal value of the base LP (the pinned face).
    pub base_optimum: Rational,
    /// A base-LP point realizing every tracked share at its final value
    /// (the last round's primal restricted to the base variables).
    pub witness: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Floor,
    Ceiling,
}

pub fn leximin(
    problem: &LeximinProblem,
    oracle: Option<&mut dyn SeparationOracle>,
) -> Result<LeximinResult, LeximinError> {
    run(problem, oracle, Direction::Floor)
}

pub fn leximax(
    problem: &LeximinProblem,
    oracle: Option<&mut dyn SeparationOracle>,
) -> Result<LeximinResult, LeximinError> {
    run(problem, oracle, Direction::Ceiling)
}

/// Solves `lp` plus the pooled cuts, separating further against `oracle`
/// and appending any newly generated cuts to the pool. Cuts stay valid
/// across the engine's rounds, so the pool is carried along.
fn solve_pooled(
    lp: &LinearProgram,
    oracle: &mut Option<&mut dyn SeparationOracle>,
    pool: &mut Vec<Constraint>,
) -> Result<LpSolution, LpError> {
    let mut with_cuts = lp.clone();
    for cut in pool.iter() {
        with_cuts.add_constraint(cut.coeffs.clone(), cut.relation, cut.rhs.clone())?;
    }
    match oracle {
        None => with_cuts.solve(),
        Some(orc) => {
            let mut recording = |point: &[Rational]| match orc.separate(point)? {
                SeparationResult::Feasible => Ok(SeparationResult::Feasible),
                SeparationResult::Violated(cut) => {
                    pool.push(cut.clone());
                    Ok(SeparationResult::Violated(cut))
                }
            };
            solve_with_separation(&with_cuts, &mut recording, None)
        }
    }
}

fn run(
    problem: &LeximinProblem,
    mut oracle: Option<&mut dyn SeparationOracle>,
    direction: Direction,
) -> Result<LeximinResult, LeximinError> {
    let n = problem.tracked.len();
    assert!(n > 0, "tracked share set must be nonempty");
    let mut pool: Vec<Constraint> = Vec::new();

    let base_sol = solve_pooled(&problem.base, &mut oracle, &mut pool)?;
    match base_sol.status {
        LpStatus::Infeasible => return Err(LeximinError::InfeasibleBase),
        LpStatus::Unbounded => return Err(LeximinError::UnboundedBase),
        LpStatus::Optimal => {}
    }
    let opt = base_sol.objective.expect("optimal solve carries an objective");

    let mut fixed_at: Vec<Option<Rational>> = vec![None; n];
    let mut rounds: Vec<LeximinRound> = Vec::new();
    let mut witness = base_sol.primal.clone();

    while fixed_at.iter().any(Option::is_none) {
        let sense = match direction {
            Direction::Floor => Sense::Maximize,
            Direction::Ceiling => Sense::Minimize,
        };
        let mut lp = LinearProgram::new(sense);
        for j in 0..problem.base.var_count() {
            lp.add_var(problem.base.var_name(j).to_string(), problem.base.var_kind(j));
        }
        let alpha = lp.add_var("alpha", VarKind::Free);
        lp.set_objective(vec![(alpha, rat(1))])?;
        for i in 0..problem.base.constraint_count() {
            let c = problem.base.constraint(i);
            lp.add_constraint(c.coeffs.clone(), c.relation, c.rhs.clone())?;
        }
        // Pin the base objective to its exact optimum: every feasible point
        // of this LP is an optimal solution of the base LP.
        lp.add_constraint(problem.base.objective_coeffs().to_vec(), Relation::Eq, opt.clone())?;

        let mut share_row = vec![None; n];
        for (i, share) in problem.tracked.iter().enumerate() {
            match &fixed_at[i] {
                Some(m) => {
                    lp.add_constraint(share.expr.clone(), Relation::Eq, m.clone())?;
                }
                None => {
                    // Written so the dual of the row is the nonnegative
                    // normalized z_i under this solver's sign conventions.
                    let mut coeffs;
                    match direction {
                        Direction::Floor => {
                            coeffs = vec![(alpha, rat(1))];
                            coeffs.extend(share.expr.iter().map(|(j, c)| (*j, -c.clone())));
                        }
                        Direction::Ceiling => {
                            coeffs = share.expr.clone();
                            coeffs.push((alpha, rat(-1)));
                        }
                    }
                    let row = lp.add_constraint(coeffs, Relation::Le, Rational::zero())?;
                    share_row[i] = Some(row);
                }
            }
        }

        let sol = solve_pooled(&lp, &mut oracle, &mut pool)?;
        if sol.status != LpStatus::Optimal {
            return Err(LeximinError::BadFloorStatus(sol.status));
        }
        let alpha_star = sol.objective.expect("optimal solve carries an objective");

        let mut duals = vec![Rational::zero(); n];
        let mut newly_fixed = Vec::new();
        for i in 0..n {
            if let Some(row) = share_row[i] {
                let z = match direction {
                    Direction::Floor => sol.duals[row].clone(),
                    Direction::Ceiling => -sol.duals[row].clone(),
                };
                debug_assert!(z >= Rational::zero(), "share dual must be nonnegative");
                if z > Rational::zero() {
                    newly_fixed.push(i);
                }
                duals[i] = z;
            }
        }
        if newly_fixed.is_empty() {
            return Err(LeximinError::NoPositiveDual);
        }
        for &i in &newly_fixed {
            fixed_at[i] = Some(alpha_star.clone());
        }
        rounds.push(LeximinRound { alpha: alpha_star, fixed: newly_fixed, duals });
        // Complementary slackness puts every just-fixed share at alpha and
        // the equality rows hold the earlier ones, so this primal realizes
        // all fixed values so far.
        witness = sol.primal[..problem.base.var_count()].to_vec();
    }

    let shares: Vec<Rational> =
        fixed_at.into_iter().map(|m| m.expect("all shares fixed")).collect();
    for (share, expected) in problem.tracked.iter().zip(shares.iter()) {
        debug_assert_eq!(share.value(&witness), *expected, "witness must realize the shares");
    }
    Ok(LeximinResult { shares, rounds, base_optimum: opt, witness })
}

/// Outcome of a randomized refutation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Ok,
    /// A sampled feasible share vector that lexicographically dominates the
    /// candidate (witness of non-optimality).
    Dominated(Vec<Rational>),
}

/// Sorted-ascending lexicographic comparison: does `a` dominate `b`?
pub fn ascending_dominates(a: &[Rational], b: &[Rational]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// Sorted-descending comparison: is `a` lexicographically smaller than `b`
/// (i.e. does `a` dominate `b` in the leximax order)?
pub fn descending_dominates(a: &[Rational], b: &[Rational]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| y.cmp(x));
    b.sort_by(|x, y| y.cmp(x));
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// Samples feasible share vectors over the optimal face (random seeded
/// linear objectives) and reports any vector that lexicographically
/// dominates `candidate` in the leximin order.
pub fn verify_leximin(
    problem: &LeximinProblem,
    candidate: &[Rational],
    sample_count: usize,
    seed: u64,
) -> Result<VerifyOutcome, LeximinError> {
    sample_refute(problem, candidate, sample_count, seed, ascending_dominates)
}

/// Leximax mirror of [`verify_leximin`].
pub fn verify_leximax(
    problem: &LeximinProblem,
    candidate: &[Rational],
    sample_count: usize,
    seed: u64,
) -> Result<VerifyOutcome, LeximinError> {
    sample_refute(problem, candidate, sample_count, seed, descending_dominates)
}

fn sample_refute(
    problem: &LeximinProblem,
    candidate: &[Rational],
    sample_count: usize,
    seed: u64,
    dominates: fn(&[Rational], &[Rational]) -> bool,
) -> Result<VerifyOutcome, LeximinError> {
    assert_eq!(candidate.len(), problem.tracked.len(), "candidate arity mismatch");
    let mut pool: Vec<Constraint> = Vec::new();
    let mut none: Option<&mut dyn SeparationOracle> = None;

    let base_sol = solve_pooled(&problem.base, &mut none, &mut pool)?;
    if base_sol.status != LpStatus::Optimal {
        return Err(LeximinError::InfeasibleBase);
    }
    let opt = base_sol.objective.expect("optimal solve carries an objective");
    let mut pinned = problem.base.clone();
    pinned.add_constraint(problem.base.objective_coeffs().to_vec(), Relation::Eq, opt)?;

    // Random objectives reach only vertices of the optimal face; convex
    // combinations of previously seen vertices cover its interior, where
    // the dominating points typically live.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: Vec<Vec<Rational>> = Vec::new();
    for round in 0..sample_count {
        let shares = if round % 2 == 0 || seen.len() < 2 {
            let mut obj = Vec::new();
            for share in &problem.tracked {
                let w = rat(rng.gen_range(-3i64..=3));
                for (j, c) in &share.expr {
                    obj.push((*j, c * &w));
                }
            }
            let mut lp = pinned.clone();
            lp.set_objective(obj)?;
            let sol = lp.solve()?;
            if sol.status != LpStatus::Optimal {
                continue;
            }
            let shares: Vec<Rational> =
                problem.tracked.iter().map(|s| s.value(&sol.primal)).collect();
            seen.push(shares.clone());
            shares
        } else {
            let a = &seen[rng.gen_range(0..seen.len())];
            let b = &seen[rng.gen_range(0..seen.len())];
            let lambda = ratio(rng.gen_range(1i64..=3), 4);
            let mu = rat(1) - &lambda;
            a.iter().zip(b.iter()).map(|(x, y)| x * &lambda + y * &mu).collect()
        };
        if dominates(&shares, candidate) {
            return Ok(VerifyOutcome::Dominated(shares));
        }
    }
    Ok(VerifyOutcome::Ok)
}

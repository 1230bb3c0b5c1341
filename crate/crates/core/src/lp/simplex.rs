//! Two-phase dense simplex with Bland's rule.
//!
//! The model is lowered to standard form (free variables split into
//! nonnegative pairs, rows normalized to nonnegative right-hand sides,
//! slack/artificial columns appended). Artificial columns are kept in the
//! tableau through phase two — banned from entering and pivoted out at zero
//! ratio whenever their row is touched — because their reduced costs are
//! exactly the negated duals, which gives certificate extraction for free.
//!
//! Bland's rule guarantees termination under the heavy degeneracy that the
//! iterative leximin programs produce, and makes every solve deterministic.

use num_traits::Zero;

use super::{Feasibility, LinearProgram, LpError, LpSolution, LpStatus, Relation, Sense, VarKind};
use crate::rational::Rational;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    cost: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
    /// Column index of the first artificial, `ncols` if none.
    artificial_start: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, q: usize) {
        let p = self.rows[r][q].clone();
        debug_assert!(!p.is_zero());
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        self.rhs[r] /= &p;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][q].is_zero() {
                continue;
            }
            let f = std::mem::replace(&mut self.rows[i][q], Rational::zero());
            for j in 0..self.ncols {
                if j != q && !self.rows[r][j].is_zero() {
                    let delta = &f * &self.rows[r][j];
                    self.rows[i][j] -= delta;
                }
            }
            if !self.rhs[r].is_zero() {
                let delta = &f * &self.rhs[r];
                self.rhs[i] -= delta;
            }
        }
        if !self.cost[q].is_zero() {
            let f = std::mem::replace(&mut self.cost[q], Rational::zero());
            for j in 0..self.ncols {
                if j != q && !self.rows[r][j].is_zero() {
                    let delta = &f * &self.rows[r][j];
                    self.cost[j] -= delta;
                }
            }
        }
        self.basis[r] = q;
    }

    /// Reduced costs of `raw_cost` under the current basis.
    fn install_costs(&mut self, raw_cost: &[Rational]) {
        self.cost = raw_cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            if raw_cost[b].is_zero() {
                continue;
            }
            let f = raw_cost[b].clone();
            for j in 0..self.ncols {
                if !self.rows[r][j].is_zero() {
                    let delta = &f * &self.rows[r][j];
                    self.cost[j] -= delta;
                }
            }
        }
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.artificial_start
    }

    /// Runs Bland iterations until optimal or unbounded.
    /// `guard_artificials` enables the zero-ratio pivots that keep basic
    /// artificials at zero during phase two.
    fn iterate(&mut self, ban_artificials: bool, guard_artificials: bool) -> Result<bool, LpError> {
        loop {
            // Entering: lowest-index column with negative reduced cost.
            let mut entering = None;
            for j in 0..self.ncols {
                if ban_artificials && self.is_artificial(j) {
                    continue;
                }
                if self.cost[j] < Rational::zero() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(q) = entering else { return Ok(true) };

            // Leaving: basic artificials leave at zero ratio first (they sit
            // at value zero, so pivoting on any nonzero entry is feasible);
            // otherwise the usual minimum-ratio test with Bland tie-breaking.
            let mut guard: Option<usize> = None;
            if guard_artificials {
                for r in 0..self.rows.len() {
                    if self.is_artificial(self.basis[r]) && !self.rows[r][q].is_zero() {
                        debug_assert!(self.rhs[r].is_zero());
                        if guard.map_or(true, |g| self.basis[r] < self.basis[g]) {
                            guard = Some(r);
                        }
                    }
                }
            }
            if let Some(r) = guard {
                self.pivot(r, q);
                continue;
            }

            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][q] <= Rational::zero() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][q];
                let take = match &leaving {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if take {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, q),
                None => return Ok(false),
            }
        }
    }

    fn primal_of(&self, col: usize) -> Rational {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or_else(Rational::zero, |r| self.rhs[r].clone())
    }
}

pub(super) fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let n_model = lp.var_count();
    let m = lp.constraint_count();

    // Decision columns: free variables split into nonnegative pairs.
    let mut col_of_var: Vec<(usize, Option<usize>)> = Vec::with_capacity(n_model);
    let mut ndec = 0usize;
    for j in 0..n_model {
        match lp.var_kind(j) {
            VarKind::NonNeg => {
                col_of_var.push((ndec, None));
                ndec += 1;
            }
            VarKind::Free => {
                col_of_var.push((ndec, Some(ndec + 1)));
                ndec += 2;
            }
        }
    }

    // Count extra columns.
    let mut n_slack = 0usize;
    let mut n_art = 0usize;
    let mut flipped = vec![false; m];
    let mut relations = Vec::with_capacity(m);
    for i in 0..m {
        let con = lp.constraint(i);
        let mut rel = con.relation;
        if con.rhs < Rational::zero() {
            flipped[i] = true;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        match rel {
            Relation::Le => n_slack += 1,
            Relation::Ge => {
                n_slack += 1;
                n_art += 1;
            }
            Relation::Eq => n_art += 1,
        }
        relations.push(rel);
    }

    let ncols = ndec + n_slack + n_art;
    let artificial_start = ndec + n_slack;
    let mut t = Tableau {
        rows: vec![vec![Rational::zero(); ncols]; m],
        rhs: vec![Rational::zero(); m],
        cost: Vec::new(),
        basis: vec![0; m],
        ncols,
        artificial_start,
    };

    let mut identity_col = vec![0usize; m];
    let mut next_slack = ndec;
    let mut next_art = artificial_start;
    for i in 0..m {
        let con = lp.constraint(i);
        let sign = if flipped[i] { -Rational::from_integer(1.into()) } else { Rational::from_integer(1.into()) };
        for (j, c) in &con.coeffs {
            let v = c * &sign;
            let (pos, neg) = col_of_var[*j];
            t.rows[i][pos] += &v;
            if let Some(neg) = neg {
                t.rows[i][neg] -= &v;
            }
        }
        t.rhs[i] = &con.rhs * &sign;
        match relations[i] {
            Relation::Le => {
                t.rows[i][next_slack] = Rational::from_integer(1.into());
                t.basis[i] = next_slack;
                identity_col[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                t.rows[i][next_slack] = -Rational::from_integer(1.into());
                next_slack += 1;
                t.rows[i][next_art] = Rational::from_integer(1.into());
                t.basis[i] = next_art;
                identity_col[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                t.rows[i][next_art] = Rational::from_integer(1.into());
                t.basis[i] = next_art;
                identity_col[i] = next_art;
                next_art += 1;
            }
        }
    }

    // Phase one: minimize the sum of artificials.
    if n_art > 0 {
        let mut phase1 = vec![Rational::zero(); ncols];
        for c in phase1.iter_mut().skip(artificial_start) {
            *c = Rational::from_integer(1.into());
        }
        t.install_costs(&phase1);
        if !t.iterate(false, false)? {
            return Err(LpError::Internal("phase one unbounded".into()));
        }
        let infeasibility: Rational = (0..m)
            .filter(|&r| t.is_artificial(t.basis[r]))
            .map(|r| t.rhs[r].clone())
            .sum();
        if !infeasibility.is_zero() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                primal: Vec::new(),
                duals: Vec::new(),
                objective: None,
            });
        }
    }

    // Phase two: the real objective, minimized.
    let negate = lp.sense() == Sense::Maximize;
    let mut raw = vec![Rational::zero(); ncols];
    for (j, c) in lp.objective_coeffs() {
        let v = if negate { -c.clone() } else { c.clone() };
        let (pos, neg) = col_of_var[*j];
        raw[pos] += &v;
        if let Some(neg) = neg {
            raw[neg] -= &v;
        }
    }
    t.install_costs(&raw);
    if !t.iterate(true, true)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: Vec::new(),
            duals: Vec::new(),
            objective: None,
        });
    }

    // Extract primal.
    let mut primal = Vec::with_capacity(n_model);
    for j in 0..n_model {
        let (pos, neg) = col_of_var[j];
        let mut v = t.primal_of(pos);
        if let Some(neg) = neg {
            v -= t.primal_of(neg);
        }
        primal.push(v);
    }
    let objective = lp.objective_value(&primal);

    // Extract duals from the reduced costs of the per-row identity columns.
    let mut duals = Vec::with_capacity(m);
    for i in 0..m {
        let mut y = -t.cost[identity_col[i]].clone();
        if flipped[i] {
            y = -y;
        }
        if negate {
            y = -y;
        }
        duals.push(y);
    }

    verify_certificates(lp, &primal, &duals, &objective)?;
    Ok(LpSolution { status: LpStatus::Optimal, primal, duals, objective: Some(objective) })
}

/// Exact verification of the optimality certificates. Any failure here is a
/// solver bug, never a property of the model.
fn verify_certificates(
    lp: &LinearProgram,
    primal: &[Rational],
    duals: &[Rational],
    objective: &Rational,
) -> Result<(), LpError> {
    if lp.check_feasibility(primal)? != Feasibility::Feasible {
        return Err(LpError::Internal("optimal primal fails feasibility".into()));
    }

    let dual_obj: Rational =
        duals.iter().zip(0..lp.constraint_count()).map(|(y, i)| y * &lp.constraint(i).rhs).sum();
    if dual_obj != *objective {
        return Err(LpError::Internal(format!(
            "strong duality violated: primal {objective}, dual {dual_obj}"
        )));
    }

    let maximize = lp.sense() == Sense::Maximize;
    for (i, y) in duals.iter().enumerate() {
        let con = lp.constraint(i);
        let sign_ok = match (con.relation, maximize) {
            (Relation::Eq, _) => true,
            (Relation::Le, true) | (Relation::Ge, false) => *y >= Rational::zero(),
            (Relation::Ge, true) | (Relation::Le, false) => *y <= Rational::zero(),
        };
        if !sign_ok {
            return Err(LpError::Internal(format!("dual {i} has wrong sign")));
        }
        if !y.is_zero() {
            let lhs: Rational = con.coeffs.iter().map(|(j, c)| c * &primal[*j]).sum();
            if lhs != con.rhs {
                return Err(LpError::Internal(format!(
                    "complementary slackness violated on constraint {i}"
                )));
            }
        }
    }

    let mut col_sum = vec![Rational::zero(); lp.var_count()];
    for (i, y) in duals.iter().enumerate() {
        if y.is_zero() {
            continue;
        }
        for (j, c) in &lp.constraint(i).coeffs {
            col_sum[*j] += c * y;
        }
    }
    for j in 0..lp.var_count() {
        let cj = lp
            .objective_coeffs()
            .iter()
            .find(|(k, _)| *k == j)
            .map_or_else(Rational::zero, |(_, c)| c.clone());
        let ok = match (lp.var_kind(j), maximize) {
            (VarKind::Free, _) => col_sum[j] == cj,
            (VarKind::NonNeg, true) => col_sum[j] >= cj,
            (VarKind::NonNeg, false) => col_sum[j] <= cj,
        };
        if !ok {
            return Err(LpError::Internal(format!("dual infeasible at variable {j}")));
        }
        if lp.var_kind(j) == VarKind::NonNeg && !primal[j].is_zero() && col_sum[j] != cj {
            return Err(LpError::Internal(format!(
                "complementary slackness violated at variable {j}"
            )));
        }
    }
    Ok(())
}

//! The max-weight bipartite b-matching game.
//!
//! Agents are all vertices (the `U` side first, then `V`). An edge may be
//! matched multiply, capped by both endpoint capacities. Owen imputations
//! pay each vertex `b * dual`, where `(u, v)` is an optimal dual of the
//! matching LP; membership testing is a pure feasibility check because the
//! candidate dual is fully determined by the imputation.
//!
//! The leximin/leximax paths run the generic engine over the dual LP with
//! tracked shares `b_x * dual_x`. As a cross-check, an instance can be
//! expanded into unit capacities (each vertex split into `b` copies) and
//! the engine run there with per-original aggregated shares; both paths
//! must agree exactly.


use num_traits::Signed;
use thiserror::Error;

use super::Imputation;
use crate::leximin::{self, LeximinProblem, LeximinResult, TrackedShare};
use crate::lp::{LinearProgram, LpError, LpStatus, Relation, Sense, VarKind};
use crate::rational::{is_integer, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BMatchingGameError {
    #[error("edge {0} does not cross the bipartition or is out of range")]
    BadEdge(usize),
    #[error("edge {0} has non-positive weight")]
    BadWeight(usize),
    #[error("vertex capacity of agent {0} must be at least one")]
    BadCapacity(usize),
    #[error("not an imputation: {0}")]
    NotAnImputation(String),
    #[error("dual is not optimal: objective {objective} differs from game worth {worth}")]
    NotOptimalDual { objective: Rational, worth: Rational },
    #[error("dual is infeasible: {0}")]
    InfeasibleDual(String),
    #[error("capacity sum {0} exceeds the duplication bound {1}")]
    BoundExceeded(u64, u64),
    #[error(transparent)]
    Engine(#[from] leximin::LeximinError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A b-matching game instance over bipartition `U + V`; agents are indexed
/// `U` first, then `V`.
#[derive(Debug, Clone)]
pub struct BMatchingInstance {
    u_count: usize,
    v_count: usize,
    /// `(u index, v index, weight)` with weight > 0.
    edges: Vec<(usize, usize, Rational)>,
    /// Capacity per agent (U side then V side), each at least 1.
    caps: Vec<u64>,
}

impl BMatchingInstance {
    pub fn new(
        u_count: usize,
        v_count: usize,
        edges: Vec<(usize, usize, Rational)>,
        caps: Vec<u64>,
    ) -> Result<Self, BMatchingGameError> {
        if caps.len() != u_count + v_count {
            return Err(BMatchingGameError::BadCapacity(caps.len()));
        }
        if let Some(a) = caps.iter().position(|&b| b == 0) {
            return Err(BMatchingGameError::BadCapacity(a));
        }
        for (idx, (i, j, w)) in edges.iter().enumerate() {
            if *i >= u_count || *j >= v_count {
                return Err(BMatchingGameError::BadEdge(idx));
            }
            if !w.is_positive() {
                return Err(BMatchingGameError::BadWeight(idx));
            }
        }
        Ok(BMatchingInstance { u_count, v_count, edges, caps })
    }

    pub fn u_count(&self) -> usize {
        self.u_count
    }

    pub fn v_count(&self) -> usize {
        self.v_count
    }

    pub fn agent_count(&self) -> usize {
        self.u_count + self.v_count
    }

    pub fn edges(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    /// Capacity of an agent (U side first, then V side).
    pub fn cap(&self, agent: usize) -> u64 {
        self.caps[agent]
    }

    pub fn cap_sum(&self) -> u64 {
        self.caps.iter().sum()
    }

    fn v_agent(&self, j: usize) -> usize {
        self.u_count + j
    }

    /// Restriction to an agent subset (same indexing convention, preserving
    /// relative order). Used for coalition worths.
    pub fn induced(&self, members: &[usize]) -> BMatchingInstance {
        let mut keep = vec![false; self.agent_count()];
        for &a in members {
            keep[a] = true;
        }
        let mut u_map = vec![None; self.u_count];
        let mut v_map = vec![None; self.v_count];
        let mut u_count = 0;
        let mut v_count = 0;
        let mut caps = Vec::new();
        for i in 0..self.u_count {
            if keep[i] {
                u_map[i] = Some(u_count);
                u_count += 1;
                caps.push(self.caps[i]);
            }
        }
        for j in 0..self.v_count {
            if keep[self.v_agent(j)] {
                v_map[j] = Some(v_count);
                v_count += 1;
            }
        }
        for j in 0..self.v_count {
            if keep[self.v_agent(j)] {
                caps.push(self.caps[self.v_agent(j)]);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|(i, j, w)| match (u_map[*i], v_map[*j]) {
                (Some(ni), Some(nj)) => Some((ni, nj, w.clone())),
                _ => None,
            })
            .collect();
        BMatchingInstance { u_count, v_count, edges, caps }
    }
}

/// Optimal dual of the matching LP: one value per agent with
/// `u_i + v_j >= w_ij` on every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BMatchDual {
    /// Per agent, U side then V side.
    pub values: Vec<Rational>,
}

impl BMatchDual {
    pub fn objective(&self, instance: &BMatchingInstance) -> Rational {
        self.values
            .iter()
            .enumerate()
            .map(|(a, x)| x * rat(instance.caps[a] as i64))
            .sum()
    }

    pub fn check_feasible(&self, instance: &BMatchingInstance) -> Result<(), String> {
        if self.values.len() != instance.agent_count() {
            return Err("dual has wrong dimensions".into());
        }
        if let Some(a) = self.values.iter().position(|x| x.is_negative()) {
            return Err(format!("dual of agent {a} is negative"));
        }
        for (idx, (i, j, w)) in instance.edges.iter().enumerate() {
            if &self.values[*i] + &self.values[instance.v_agent(*j)] < *w {
                return Err(format!("edge {idx} is under-covered"));
            }
        }
        Ok(())
    }
}

/// Primal LP: maximize total weight under vertex capacities. Variable `e`
/// is the multiplicity of edge `e`.
fn primal_lp(instance: &BMatchingInstance) -> LinearProgram {
    let mut lp = LinearProgram::new(Sense::Maximize);
    for e in 0..instance.edges.len() {
        lp.add_var(format!("x_{e}"), VarKind::NonNeg);
    }
    for i in 0..instance.u_count {
        let coeffs: Vec<(usize, Rational)> = instance
            .edges
            .iter()
            .enumerate()
            .filter(|(_, (ei, _, _))| *ei == i)
            .map(|(e, _)| (e, rat(1)))
            .collect();
        lp.add_constraint(coeffs, Relation::Le, rat(instance.caps[i] as i64))
            .expect("indices in range");
    }
    for j in 0..instance.v_count {
        let coeffs: Vec<(usize, Rational)> = instance
            .edges
            .iter()
            .enumerate()
            .filter(|(_, (_, ej, _))| *ej == j)
            .map(|(e, _)| (e, rat(1)))
            .collect();
        lp.add_constraint(coeffs, Relation::Le, rat(instance.caps[instance.v_agent(j)] as i64))
            .expect("indices in range");
    }
    lp.set_objective(
        instance.edges.iter().enumerate().map(|(e, (_, _, w))| (e, w.clone())).collect(),
    )
    .expect("indices in range");
    lp
}

/// Dual LP: minimize `sum b * dual` covering every edge weight. Variable
/// order matches agent order.
pub fn dual_lp(instance: &BMatchingInstance) -> LinearProgram {
    let mut lp = LinearProgram::new(Sense::Minimize);
    for a in 0..instance.agent_count() {
        lp.add_var(format!("y_{a}"), VarKind::NonNeg);
    }
    for (i, j, w) in &instance.edges {
        lp.add_constraint(
            vec![(*i, rat(1)), (instance.v_agent(*j), rat(1))],
            Relation::Ge,
            w.clone(),
        )
        .expect("indices in range");
    }
    lp.set_objective(
        (0..instance.agent_count()).map(|a| (a, rat(instance.caps[a] as i64))).collect(),
    )
    .expect("indices in range");
    lp
}

/// Optimal matching: integral edge multiplicities, the game worth, and an
/// optimal dual.
///
/// The vertex-capacity polytope is integral, so a simplex basic optimum
/// must come out integral. A fractional answer is rounded along cycles of
/// its support without changing the weight.
pub fn max_weight_bmatching(
    instance: &BMatchingInstance,
) -> Result<(Vec<Rational>, Rational, BMatchDual), BMatchingGameError> {
    let lp = primal_lp(instance);
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(BMatchingGameError::Internal(format!(
            "matching LP came back {:?}",
            sol.status
        )));
    }
    let mut multiplicities = sol.primal.clone();
    if multiplicities.iter().any(|x| !is_integer(x)) {
        round_to_integral(instance, &mut multiplicities)?;
    }
    let value = sol.objective.clone().expect("optimal solve carries an objective");
    let check: Rational = instance
        .edges
        .iter()
        .zip(multiplicities.iter())
        .map(|((_, _, w), x)| w * x)
        .sum();
    if check != value {
        return Err(BMatchingGameError::Internal(
            "integral rounding changed the matching weight".into(),
        ));
    }
    let dual = BMatchDual { values: sol.duals.clone() };
    dual.check_feasible(instance).map_err(BMatchingGameError::InfeasibleDual)?;
    if dual.objective(instance) != value {
        return Err(BMatchingGameError::Internal("dual objective mismatch".into()));
    }
    Ok((multiplicities, value, dual))
}

/// Rotates fractional mass around cycles of the fractional support until
/// everything is integral, keeping all degrees and the total weight.
fn round_to_integral(
    instance: &BMatchingInstance,
    x: &mut [Rational],
) -> Result<(), BMatchingGameError> {
    loop {
        let fractional: Vec<usize> =
            (0..x.len()).filter(|&e| !is_integer(&x[e])).collect();
        if fractional.is_empty() {
            return Ok(());
        }
        // Cycle search in the bipartite multigraph of fractional edges.
        let cycle = find_fractional_cycle(instance, &fractional)
            .ok_or_else(|| BMatchingGameError::Internal(
                "fractional optimum with acyclic support cannot come from a basic solve".into(),
            ))?;
        // Alternate +theta / -theta around the (even) cycle; pick the
        // orientation that does not lower the weight and the largest step
        // that keeps every edge within its fractional unit.
        let mut signed: Vec<(usize, i8)> = Vec::new();
        for (k, &e) in cycle.iter().enumerate() {
            signed.push((e, if k % 2 == 0 { 1 } else { -1 }));
        }
        let swing: Rational = signed
            .iter()
            .map(|(e, s)| {
                let (_, _, w) = &instance.edges[*e];
                if *s > 0 {
                    w.clone()
                } else {
                    -w.clone()
                }
            })
            .sum();
        if swing.is_negative() {
            for (_, s) in signed.iter_mut() {
                *s = -*s;
            }
        }
        let mut theta: Option<Rational> = None;
        for (e, s) in &signed {
            let frac = &x[*e] - x[*e].floor();
            let room = if *s > 0 { rat(1) - &frac } else { frac };
            if theta.as_ref().map_or(true, |t| room < *t) {
                theta = Some(room);
            }
        }
        let theta = theta.expect("cycle is nonempty");
        for (e, s) in &signed {
            if *s > 0 {
                x[*e] += &theta;
            } else {
                x[*e] -= &theta;
            }
        }
    }
}

/// An even closed walk of fractional edges, alternating sides, returned as
/// edge ids in cycle order.
fn find_fractional_cycle(instance: &BMatchingInstance, fractional: &[usize]) -> Option<Vec<usize>> {
    // Vertices: U side 0..u_count, V side offset. Walk greedily: from any
    // fractional edge, keep extending with an unused fractional edge at the
    // far endpoint; in a capacitated bipartite support a cycle must close.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); instance.agent_count()];
    for &e in fractional {
        let (i, j, _) = &instance.edges[e];
        adj[*i].push(e);
        adj[instance.v_agent(*j)].push(e);
    }
    let start = *fractional.first()?;
    let mut used = vec![false; instance.edges.len()];
    let mut path: Vec<(usize, usize)> = Vec::new(); // (edge, entry vertex)
    let mut at = {
        let (i, _, _) = &instance.edges[start];
        *i
    };
    let mut visited_at: Vec<Option<usize>> = vec![None; instance.agent_count()];
    loop {
        if let Some(pos) = visited_at[at] {
            return Some(path[pos..].iter().map(|(e, _)| *e).collect());
        }
        visited_at[at] = Some(path.len());
        let next = adj[at].iter().find(|&&e| !used[e]).copied()?;
        used[next] = true;
        let (i, j, _) = &instance.edges[next];
        let other = if at == *i { instance.v_agent(*j) } else { *i };
        path.push((next, at));
        at = other;
    }
}

/// Owen imputation from an optimal dual: each agent gets `b * dual`.
pub fn owen_from_dual(
    instance: &BMatchingInstance,
    dual: &BMatchDual,
) -> Result<Imputation, BMatchingGameError> {
    dual.check_feasible(instance).map_err(BMatchingGameError::InfeasibleDual)?;
    let (_, worth, _) = max_weight_bmatching(instance)?;
    let objective = dual.objective(instance);
    if objective != worth {
        return Err(BMatchingGameError::NotOptimalDual { objective, worth });
    }
    Ok((0..instance.agent_count())
        .map(|a| &dual.values[a] * rat(instance.caps[a] as i64))
        .collect())
}

/// Leximin problem over the dual LP, tracking `b * dual` per agent.
pub fn leximin_problem(instance: &BMatchingInstance) -> LeximinProblem {
    let tracked = (0..instance.agent_count())
        .map(|a| TrackedShare::scaled_var(format!("agent_{a}"), a, rat(instance.caps[a] as i64)))
        .collect();
    LeximinProblem { base: dual_lp(instance), tracked }
}

pub fn leximin_owen(instance: &BMatchingInstance) -> Result<Imputation, BMatchingGameError> {
    Ok(leximin::leximin(&leximin_problem(instance), None)?.shares)
}

pub fn leximax_owen(instance: &BMatchingInstance) -> Result<Imputation, BMatchingGameError> {
    Ok(leximin::leximax(&leximin_problem(instance), None)?.shares)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OwenMembership {
    Yes(BMatchDual),
    No(String),
}

/// Membership needs no search: the dual is fully determined by the shares
/// (`dual = share / b`), so the answer is a feasibility check.
pub fn check_owen_membership(
    instance: &BMatchingInstance,
    shares: &[Rational],
) -> Result<OwenMembership, BMatchingGameError> {
    let (_, worth, _) = max_weight_bmatching(instance)?;
    if shares.len() != instance.agent_count() {
        return Err(BMatchingGameError::NotAnImputation(format!(
            "expected {} shares, got {}",
            instance.agent_count(),
            shares.len()
        )));
    }
    if let Some(a) = shares.iter().position(|p| p.is_negative()) {
        return Err(BMatchingGameError::NotAnImputation(format!("share of agent {a} is negative")));
    }
    let total: Rational = shares.iter().cloned().sum();
    if total != worth {
        return Err(BMatchingGameError::NotAnImputation(format!(
            "shares sum to {total}, worth is {worth}"
        )));
    }
    let dual = BMatchDual {
        values: (0..instance.agent_count())
            .map(|a| &shares[a] / rat(instance.caps[a] as i64))
            .collect(),
    };
    match dual.check_feasible(instance) {
        Ok(()) => {
            // Optimality comes free: the objective equals the share total.
            debug_assert_eq!(dual.objective(instance), worth);
            Ok(OwenMembership::Yes(dual))
        }
        Err(reason) => Ok(OwenMembership::No(reason)),
    }
}

/// Result of expanding vertices into unit-capacity copies.
#[derive(Debug, Clone)]
pub struct DuplicatedInstance {
    pub expanded: BMatchingInstance,
    /// Original agent -> its copy agents in the expanded instance.
    pub copies: Vec<Vec<usize>>,
}

/// Replaces each vertex by `b` unit-capacity copies, connecting every copy
/// pair of an original edge with the original weight. Guarded by a bound on
/// the total capacity since the expansion is pseudo-polynomial.
pub fn duplicate_reduction(
    instance: &BMatchingInstance,
    cap_bound: u64,
) -> Result<DuplicatedInstance, BMatchingGameError> {
    let total = instance.cap_sum();
    if total > cap_bound {
        return Err(BMatchingGameError::BoundExceeded(total, cap_bound));
    }
    let mut u_copy_of: Vec<Vec<usize>> = Vec::with_capacity(instance.u_count);
    let mut next_u = 0usize;
    for i in 0..instance.u_count {
        let k = instance.caps[i] as usize;
        u_copy_of.push((next_u..next_u + k).collect());
        next_u += k;
    }
    let mut v_copy_of: Vec<Vec<usize>> = Vec::with_capacity(instance.v_count);
    let mut next_v = 0usize;
    for j in 0..instance.v_count {
        let k = instance.caps[instance.v_agent(j)] as usize;
        v_copy_of.push((next_v..next_v + k).collect());
        next_v += k;
    }
    let mut edges = Vec::new();
    for (i, j, w) in &instance.edges {
        for &ci in &u_copy_of[*i] {
            for &cj in &v_copy_of[*j] {
                edges.push((ci, cj, w.clone()));
            }
        }
    }
    let expanded = BMatchingInstance::new(next_u, next_v, edges, vec![1; next_u + next_v])?;
    let mut copies = Vec::with_capacity(instance.agent_count());
    for i in 0..instance.u_count {
        copies.push(u_copy_of[i].clone());
    }
    for j in 0..instance.v_count {
        copies.push(v_copy_of[j].iter().map(|&c| next_u + c).collect());
    }
    Ok(DuplicatedInstance { expanded, copies })
}

/// Leximin through the duplication reduction: runs the engine on the
/// expanded dual LP but tracks, per original agent, the *sum* of its
/// copies' duals — that is the original agent's share, and the expanded
/// optimal face projects onto the original one share-for-share. Tracking
/// copy-level shares instead would order a different vector and can land
/// on a different point.
pub fn leximin_owen_via_duplication(
    instance: &BMatchingInstance,
    cap_bound: u64,
) -> Result<(Imputation, LeximinResult), BMatchingGameError> {
    owen_via_duplication(instance, cap_bound, leximin::leximin)
}

/// Leximax mirror of [`leximin_owen_via_duplication`].
pub fn leximax_owen_via_duplication(
    instance: &BMatchingInstance,
    cap_bound: u64,
) -> Result<(Imputation, LeximinResult), BMatchingGameError> {
    owen_via_duplication(instance, cap_bound, leximin::leximax)
}

fn owen_via_duplication(
    instance: &BMatchingInstance,
    cap_bound: u64,
    engine: fn(
        &LeximinProblem,
        Option<&mut dyn crate::lp::SeparationOracle>,
    ) -> Result<LeximinResult, leximin::LeximinError>,
) -> Result<(Imputation, LeximinResult), BMatchingGameError> {
    let dup = duplicate_reduction(instance, cap_bound)?;
    let tracked = (0..instance.agent_count())
        .map(|a| TrackedShare {
            label: format!("agent_{a}"),
            expr: dup.copies[a].iter().map(|&c| (c, rat(1))).collect(),
        })
        .collect();
    let problem = LeximinProblem { base: dual_lp(&dup.expanded), tracked };
    let result = engine(&problem, None)?;

    // The copy-averaged witness stays feasible with the same aggregates,
    // which is exactly what mapping shares back relies on.
    let mut averaged = result.witness.clone();
    for a in 0..instance.agent_count() {
        let sum: Rational = dup.copies[a].iter().map(|&c| result.witness[c].clone()).sum();
        let avg = sum / rat(dup.copies[a].len() as i64);
        for &c in &dup.copies[a] {
            averaged[c] = avg.clone();
        }
    }
    let avg_dual = BMatchDual { values: averaged };
    avg_dual
        .check_feasible(&dup.expanded)
        .map_err(|e| BMatchingGameError::Internal(format!("copy-averaged dual infeasible: {e}")))?;

    Ok((result.shares.clone(), result))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::ratio;

    /// One U vertex joined to two V vertices, weights 1 and 3, caps (2,2,1).
    pub(crate) fn fork() -> BMatchingInstance {
        BMatchingInstance::new(
            1,
            2,
            vec![(0, 0, rat(1)), (0, 1, rat(3))],
            vec![2, 2, 1],
        )
        .unwrap()
    }

    #[test]
    fn fork_value_and_dual() {
        let (mult, value, dual) = max_weight_bmatching(&fork()).unwrap();
        assert_eq!(value, rat(4));
        assert_eq!(mult, vec![rat(1), rat(1)]);
        // The optimal dual here is unique: (1, 0, 2).
        assert_eq!(dual.values, vec![rat(1), rat(0), rat(2)]);
    }

    #[test]
    fn single_edge_and_empty() {
        let single =
            BMatchingInstance::new(1, 1, vec![(0, 0, rat(7))], vec![1, 1]).unwrap();
        let (mult, value, _) = max_weight_bmatching(&single).unwrap();
        assert_eq!(value, rat(7));
        assert_eq!(mult, vec![rat(1)]);

        let empty = BMatchingInstance::new(2, 1, vec![], vec![1, 1, 1]).unwrap();
        let (_, value, _) = max_weight_bmatching(&empty).unwrap();
        assert_eq!(value, rat(0));
    }

    #[test]
    fn owen_from_dual_examples() {
        let inst = fork();
        let dual = BMatchDual { values: vec![rat(1), rat(0), rat(2)] };
        assert_eq!(owen_from_dual(&inst, &dual).unwrap(), vec![rat(2), rat(0), rat(2)]);

        let single = BMatchingInstance::new(1, 1, vec![(0, 0, rat(7))], vec![1, 1]).unwrap();
        let left = BMatchDual { values: vec![rat(7), rat(0)] };
        assert_eq!(owen_from_dual(&single, &left).unwrap(), vec![rat(7), rat(0)]);
        let right = BMatchDual { values: vec![rat(0), rat(7)] };
        assert_eq!(owen_from_dual(&single, &right).unwrap(), vec![rat(0), rat(7)]);

        let slack = BMatchDual { values: vec![rat(7), rat(7)] };
        assert!(matches!(
            owen_from_dual(&single, &slack),
            Err(BMatchingGameError::NotOptimalDual { .. })
        ));
    }

    #[test]
    fn leximin_and_leximax_examples() {
        // Unique dual: both orders give (2, 0, 2).
        assert_eq!(leximin_owen(&fork()).unwrap(), vec![rat(2), rat(0), rat(2)]);
        assert_eq!(leximax_owen(&fork()).unwrap(), vec![rat(2), rat(0), rat(2)]);

        // Single weight-7 edge: the dual face is a segment, leximin splits.
        let single = BMatchingInstance::new(1, 1, vec![(0, 0, rat(7))], vec![1, 1]).unwrap();
        assert_eq!(leximin_owen(&single).unwrap(), vec![ratio(7, 2), ratio(7, 2)]);

        // Symmetric weight-2 edge.
        let pair = BMatchingInstance::new(1, 1, vec![(0, 0, rat(2))], vec![1, 1]).unwrap();
        assert_eq!(leximin_owen(&pair).unwrap(), vec![rat(1), rat(1)]);
    }

    #[test]
    fn membership_examples() {
        let inst = fork();
        match check_owen_membership(&inst, &[rat(4), rat(0), rat(0)]).unwrap() {
            OwenMembership::No(reason) => assert!(reason.contains("under-covered")),
            other => panic!("expected rejection, got {other:?}"),
        }
        match check_owen_membership(&inst, &[rat(2), rat(0), rat(2)]).unwrap() {
            OwenMembership::Yes(dual) => assert_eq!(dual.values, vec![rat(1), rat(0), rat(2)]),
            other => panic!("expected acceptance, got {other:?}"),
        }
        let lex = leximin_owen(&inst).unwrap();
        assert!(matches!(check_owen_membership(&inst, &lex).unwrap(), OwenMembership::Yes(_)));
        assert!(matches!(
            check_owen_membership(&inst, &[rat(1), rat(1), rat(1)]),
            Err(BMatchingGameError::NotAnImputation(_))
        ));
    }

    #[test]
    fn duplication_counts() {
        let dup = duplicate_reduction(&fork(), 64).unwrap();
        assert_eq!(dup.expanded.agent_count(), 5);
        assert_eq!(dup.expanded.edges().len(), 2 * 2 + 2 * 1);
        assert!(dup.expanded.caps.iter().all(|&b| b == 1));

        // Identity on unit instances.
        let single = BMatchingInstance::new(1, 1, vec![(0, 0, rat(7))], vec![1, 1]).unwrap();
        let dup = duplicate_reduction(&single, 64).unwrap();
        assert_eq!(dup.expanded.agent_count(), 2);
        assert_eq!(dup.copies, vec![vec![0], vec![1]]);

        assert!(matches!(
            duplicate_reduction(&fork(), 3),
            Err(BMatchingGameError::BoundExceeded(5, 3))
        ));
    }

    #[test]
    fn duplication_tracks_aggregates_not_copies() {
        // One U vertex of capacity 2 against two unit V vertices, both
        // edges weight 1: the optimal dual face is the segment
        // (t, 1-t, 1-t). Aggregated shares are (2t, 1-t, 1-t), so the
        // aggregate leximin sits at t = 1/3 with shares (2/3, 2/3, 2/3),
        // while a copy-level leximin would pick t = 1/2. The duplication
        // path must reproduce the aggregate answer.
        let inst = BMatchingInstance::new(
            1,
            2,
            vec![(0, 0, rat(1)), (0, 1, rat(1))],
            vec![2, 1, 1],
        )
        .unwrap();
        let direct = leximin_owen(&inst).unwrap();
        assert_eq!(direct, vec![ratio(2, 3), ratio(2, 3), ratio(2, 3)]);
        let (via_dup, _) = leximin_owen_via_duplication(&inst, 64).unwrap();
        assert_eq!(via_dup, direct);
    }

    #[test]
    fn integral_rounding_repairs_cycles() {
        // Square cycle with all weights equal: x = 1/2 on all four edges is
        // optimal but fractional; the repair must reach an integral point
        // of the same weight.
        let inst = BMatchingInstance::new(
            2,
            2,
            vec![(0, 0, rat(1)), (0, 1, rat(1)), (1, 0, rat(1)), (1, 1, rat(1))],
            vec![1, 1, 1, 1],
        )
        .unwrap();
        let mut x = vec![ratio(1, 2); 4];
        round_to_integral(&inst, &mut x).unwrap();
        assert!(x.iter().all(is_integer));
        let weight: Rational = x.iter().cloned().sum();
        assert_eq!(weight, rat(2));
        // Degrees stay within capacity.
        assert!(x.iter().all(|v| v >= &rat(0) && v <= &rat(1)));
    }

    #[test]
    fn induced_subinstances() {
        let inst = fork();
        // U vertex with the weight-3 V vertex only.
        let sub = inst.induced(&[0, 2]);
        assert_eq!(sub.agent_count(), 2);
        let (_, value, _) = max_weight_bmatching(&sub).unwrap();
        assert_eq!(value, rat(3));
    }
}

//! The min-cost branching game (MST as the bidirected special case).
//!
//! Agents are the non-root vertices; the worth of a coalition is the cost of
//! a cheapest edge set letting every coalition member reach the root. Owen
//! cost-shares are splits of feasible duals of the cut-covering LP: a
//! nonnegative weight per vertex set, packed under the edge costs, with each
//! set's weight divided among its members.
//!
//! The share-fixing LPs over those per-set variables have exponentially many
//! constraints, one per (set, member) pair. They are solved by constraint
//! generation: the separation oracle runs one max-flow per agent toward the
//! root under capacities `z(e)` and, when the flow is short of the required
//! threshold, emits the violated cut as the source side of a minimum cut.

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::Imputation;
use crate::graph::{max_flow, min_vertex_cut_side, CapacityMap, DiGraph, GraphError};
use crate::lp::{
    solve_with_separation, Constraint, LinearProgram, LpError, LpSolution, LpStatus, Relation,
    Sense, SeparationResult, VarKind,
};
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchingGameError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} has no path to the root; worth would be undefined")]
    Disconnected(usize),
    #[error("edge {0} has negative cost")]
    NegativeCost(usize),
    #[error("not an imputation: {0}")]
    NotAnImputation(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("no unfixed agent had a positive dual; the normalization makes this impossible")]
    NoPositiveDual,
    #[error("relaxation hit its variable box at bound {0}; retries exhausted")]
    BoxExhausted(Rational),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A branching game instance. Agents are the vertices other than the root,
/// in ascending vertex order.
#[derive(Debug, Clone)]
pub struct BranchingInstance {
    graph: DiGraph,
    costs: Vec<Rational>,
    root: usize,
}

impl BranchingInstance {
    pub fn new(
        graph: DiGraph,
        costs: Vec<Rational>,
        root: usize,
    ) -> Result<Self, BranchingGameError> {
        if root >= graph.vertex_count() {
            return Err(GraphError::InvalidVertex(root, graph.vertex_count()).into());
        }
        if costs.len() != graph.edge_count() {
            return Err(GraphError::CapacityLenMismatch(costs.len(), graph.edge_count()).into());
        }
        if let Some(e) = costs.iter().position(|c| c.is_negative()) {
            return Err(BranchingGameError::NegativeCost(e));
        }
        let inst = BranchingInstance { graph, costs, root };
        let reach = inst.reaches_root(&vec![true; inst.graph.vertex_count()]);
        if let Some(v) = (0..inst.graph.vertex_count()).find(|&v| !reach[v]) {
            return Err(BranchingGameError::Disconnected(v));
        }
        Ok(inst)
    }

    /// Lowers an undirected (spanning-tree) instance: each undirected edge
    /// becomes two directed edges of equal cost. Returns the instance and,
    /// per directed edge, the undirected edge it came from.
    pub fn bidirected(
        vertex_count: usize,
        undirected_edges: &[(usize, usize, Rational)],
        root: usize,
    ) -> Result<(Self, Vec<usize>), BranchingGameError> {
        let mut graph = DiGraph::new(vertex_count);
        let mut costs = Vec::new();
        let mut origin = Vec::new();
        for (idx, (a, b, c)) in undirected_edges.iter().enumerate() {
            graph.add_edge(*a, *b).map_err(BranchingGameError::from)?;
            costs.push(c.clone());
            origin.push(idx);
            graph.add_edge(*b, *a).map_err(BranchingGameError::from)?;
            costs.push(c.clone());
            origin.push(idx);
        }
        Ok((Self::new(graph, costs, root)?, origin))
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn costs(&self) -> &[Rational] {
        &self.costs
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Agent ids in share-vector order.
    pub fn agents(&self) -> Vec<usize> {
        (0..self.graph.vertex_count()).filter(|&v| v != self.root).collect()
    }

    pub fn agent_count(&self) -> usize {
        self.graph.vertex_count() - 1
    }

    /// Which vertices can reach the root using only vertices in `allowed`.
    fn reaches_root(&self, allowed: &[bool]) -> Vec<bool> {
        let mut in_adj = vec![Vec::new(); self.graph.vertex_count()];
        for (_, t, h) in self.graph.edges() {
            if allowed[t] && allowed[h] {
                in_adj[h].push(t);
            }
        }
        let mut seen = vec![false; self.graph.vertex_count()];
        if !allowed[self.root] {
            return seen;
        }
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(v) = stack.pop() {
            for &t in &in_adj[v] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn worth(&self) -> Result<Rational, BranchingGameError> {
        Ok(self.min_cost_branching()?.1)
    }

    /// Minimum-cost branching: a cheapest edge set giving every non-root
    /// vertex a path to the root. Returns the chosen edge ids and the cost.
    pub fn min_cost_branching(&self) -> Result<(Vec<usize>, Rational), BranchingGameError> {
        // The arborescence code grows away from the root, so feed it the
        // reversed edges.
        let edges: Vec<ArbEdge> = self
            .graph
            .edges()
            .map(|(id, t, h)| ArbEdge { tail: h, head: t, cost: self.costs[id].clone(), id })
            .collect();
        let allowed = vec![true; self.graph.vertex_count()];
        match min_arborescence(&allowed, self.root, &edges) {
            Some(mut ids) => {
                ids.sort_unstable();
                let cost = ids.iter().map(|&e| self.costs[e].clone()).sum();
                Ok((ids, cost))
            }
            None => Err(BranchingGameError::Internal(
                "validated instance must admit a branching".into(),
            )),
        }
    }

    /// Worth of a coalition: the minimum branching cost in the subgraph
    /// induced on the coalition plus the root, or `None` when some member
    /// cannot reach the root there (the coalition's core constraint is then
    /// vacuous).
    pub fn coalition_worth(&self, members: &[usize]) -> Option<Rational> {
        let n = self.graph.vertex_count();
        let mut allowed = vec![false; n];
        allowed[self.root] = true;
        for &v in members {
            if v == self.root || v >= n {
                return None;
            }
            allowed[v] = true;
        }
        let reach = self.reaches_root(&allowed);
        if members.iter().any(|&v| !reach[v]) {
            return None;
        }
        let edges: Vec<ArbEdge> = self
            .graph
            .edges()
            .filter(|&(_, t, h)| allowed[t] && allowed[h])
            .map(|(id, t, h)| ArbEdge { tail: h, head: t, cost: self.costs[id].clone(), id })
            .collect();
        min_arborescence(&allowed, self.root, &edges)
            .map(|ids| ids.iter().map(|&e| self.costs[e].clone()).sum())
    }

    /// Out-cut of a vertex set: edges with tail inside and head outside.
    fn out_cut(&self, inside: &[bool]) -> Vec<usize> {
        self.graph
            .edges()
            .filter(|&(_, t, h)| inside[t] && !inside[h])
            .map(|(id, _, _)| id)
            .collect()
    }
}

#[derive(Debug, Clone)]
struct ArbEdge {
    tail: usize,
    head: usize,
    cost: Rational,
    id: usize,
}

/// Minimum-cost out-arborescence rooted at `root` over the `allowed`
/// vertices, by cheapest-in-edge selection and cycle contraction. Returns
/// the chosen original edge ids, or `None` if some vertex is unreachable.
fn min_arborescence(allowed: &[bool], root: usize, edges: &[ArbEdge]) -> Option<Vec<usize>> {
    let n = allowed.len();
    let active: Vec<usize> = (0..n).filter(|&v| allowed[v]).collect();
    if active.len() <= 1 {
        return Some(Vec::new());
    }

    // Cheapest incoming edge per non-root vertex; ties by edge id.
    let mut pick: Vec<Option<usize>> = vec![None; n];
    for (idx, e) in edges.iter().enumerate() {
        if e.head == root || e.tail == e.head {
            continue;
        }
        let better = match pick[e.head] {
            None => true,
            Some(cur) => {
                let c = &edges[cur];
                e.cost < c.cost || (e.cost == c.cost && e.id < c.id)
            }
        };
        if better {
            pick[e.head] = Some(idx);
        }
    }
    for &v in &active {
        if v != root && pick[v].is_none() {
            return None;
        }
    }

    // Cycles of the functional graph v -> tail(pick[v]).
    let mut color = vec![0u8; n]; // 0 unvisited, 1 on current walk, 2 done
    color[root] = 2;
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for &start in &active {
        if color[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        while color[v] == 0 {
            color[v] = 1;
            path.push(v);
            v = edges[pick[v].expect("non-root active vertices have picks")].tail;
        }
        if color[v] == 1 {
            let pos = path.iter().position(|&x| x == v).expect("v is on the current walk");
            cycles.push(path[pos..].to_vec());
        }
        for &x in &path {
            color[x] = 2;
        }
    }

    if cycles.is_empty() {
        return Some(
            active
                .iter()
                .filter(|&&v| v != root)
                .map(|&v| edges[pick[v].expect("checked above")].id)
                .collect(),
        );
    }

    // Contract every cycle into a fresh vertex.
    let mut comp = vec![usize::MAX; n];
    let mut next = 0usize;
    let mut in_cycle = vec![false; n];
    for cyc in &cycles {
        for &v in cyc {
            comp[v] = next;
            in_cycle[v] = true;
        }
        next += 1;
    }
    for &v in &active {
        if comp[v] == usize::MAX {
            comp[v] = next;
            next += 1;
        }
    }

    let mut sub_edges: Vec<ArbEdge> = Vec::new();
    let mut sub_origin: Vec<usize> = Vec::new();
    for (idx, e) in edges.iter().enumerate() {
        let (ct, ch) = (comp[e.tail], comp[e.head]);
        if ct == ch {
            continue;
        }
        let reduced = if in_cycle[e.head] {
            &e.cost - &edges[pick[e.head].expect("cycle vertices have picks")].cost
        } else {
            e.cost.clone()
        };
        sub_edges.push(ArbEdge { tail: ct, head: ch, cost: reduced, id: sub_edges.len() });
        sub_origin.push(idx);
    }

    let sub_allowed = vec![true; next];
    let chosen_sub = min_arborescence(&sub_allowed, comp[root], &sub_edges)?;

    // Expand: each contracted cycle keeps all its picks except at the
    // vertex where the chosen solution enters it.
    let mut result = Vec::new();
    let mut entered: Vec<Option<usize>> = vec![None; cycles.len()];
    for sid in chosen_sub {
        let e = &edges[sub_origin[sid]];
        result.push(e.id);
        if in_cycle[e.head] {
            entered[comp[e.head]] = Some(e.head);
        }
    }
    for (ci, cyc) in cycles.iter().enumerate() {
        let skip = entered[ci].expect("every contracted cycle is entered exactly once");
        for &v in cyc {
            if v != skip {
                result.push(edges[pick[v].expect("cycle vertices have picks")].id);
            }
        }
    }
    Some(result)
}

/// Which threshold the generated cut constraints must clear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSeries {
    /// `sum_{e in cut(S)} z(e) >= z(v) + beta` (raising the minimum share).
    Floor,
    /// `sum_{e in cut(S)} z(e) >= -z(v) + beta` (lowering the maximum share).
    Ceiling,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Feasible,
    /// The set and member whose constraint the point violates.
    Violated { members: Vec<usize>, vertex: usize },
}

/// Separation oracle for the cut-constraint families: the maximum flow from
/// an agent `v` to the root under capacities `z(e)` equals the minimum
/// out-cut weight over sets containing `v`, so the family holds iff every
/// such flow reaches the threshold.
pub fn separation_oracle(
    instance: &BranchingInstance,
    z_edges: &[Rational],
    z_vertices: &[Rational],
    beta: &Rational,
    series: CutSeries,
) -> Result<OracleVerdict, BranchingGameError> {
    let caps = CapacityMap::new(&instance.graph, z_edges.to_vec())?;
    for (ai, &v) in instance.agents().iter().enumerate() {
        let threshold = match series {
            CutSeries::Floor => &z_vertices[ai] + beta,
            CutSeries::Ceiling => beta - &z_vertices[ai],
        };
        let flow = max_flow(&instance.graph, &caps, v, instance.root)?;
        if flow.value < threshold {
            let side = min_vertex_cut_side(&instance.graph, &caps, &flow, v);
            debug_assert!(side.contains(&v) && !side.contains(&instance.root));
            return Ok(OracleVerdict::Violated { members: side, vertex: v });
        }
    }
    Ok(OracleVerdict::Feasible)
}

/// Per-round LP of the iterative share-fixing series. Variable order:
/// `z(e)` per edge, `z(v)` per agent, then `beta`.
struct SeriesRound<'a> {
    instance: &'a BranchingInstance,
    series: CutSeries,
    fixed: Vec<Option<Rational>>,
    bound: Rational,
    opt: Rational,
}

impl SeriesRound<'_> {
    fn agent_var(&self, ai: usize) -> usize {
        self.instance.graph.edge_count() + ai
    }

    fn beta_var(&self) -> usize {
        self.instance.graph.edge_count() + self.instance.agent_count()
    }

    fn build_lp(&self) -> Result<LinearProgram, BranchingGameError> {
        let m = self.instance.graph.edge_count();
        let agents = self.instance.agents();
        let sense = match self.series {
            CutSeries::Floor => Sense::Minimize,
            CutSeries::Ceiling => Sense::Maximize,
        };
        let mut lp = LinearProgram::new(sense);
        for e in 0..m {
            lp.add_var(format!("ze_{e}"), VarKind::NonNeg);
        }
        for (ai, v) in agents.iter().enumerate() {
            let kind = if self.fixed[ai].is_some() { VarKind::Free } else { VarKind::NonNeg };
            lp.add_var(format!("zv_{v}"), kind);
        }
        lp.add_var("beta", VarKind::Free);

        // Normalization over unfixed agents.
        let norm: Vec<(usize, Rational)> = (0..agents.len())
            .filter(|&ai| self.fixed[ai].is_none())
            .map(|ai| (self.agent_var(ai), rat(1)))
            .collect();
        lp.add_constraint(norm, Relation::Eq, rat(1))?;

        // Boxes keep every relaxation bounded; final solutions must leave
        // them slack (the caller retries with a larger bound otherwise).
        lp.add_constraint(vec![(self.beta_var(), rat(1))], Relation::Le, self.bound.clone())?;
        lp.add_constraint(vec![(self.beta_var(), rat(-1))], Relation::Le, self.bound.clone())?;
        for ai in 0..agents.len() {
            if self.fixed[ai].is_some() {
                lp.add_constraint(
                    vec![(self.agent_var(ai), rat(1))],
                    Relation::Le,
                    self.bound.clone(),
                )?;
                lp.add_constraint(
                    vec![(self.agent_var(ai), rat(-1))],
                    Relation::Le,
                    self.bound.clone(),
                )?;
            }
        }

        // Objective. Floor: min  sum c(e) z(e) - sum m(v) z(v) - opt beta.
        // Ceiling: max  opt beta - sum c(e) z(e) - sum m(v) z(v).
        // The edge and beta terms flip with the sense; the fixed-share term
        // is -m(v) z(v) in both (it prices an equality row either way).
        let flip = match sense {
            Sense::Minimize => rat(1),
            Sense::Maximize => rat(-1),
        };
        let mut obj: Vec<(usize, Rational)> = Vec::new();
        for e in 0..m {
            obj.push((e, &self.instance.costs[e] * &flip));
        }
        for ai in 0..agents.len() {
            if let Some(mv) = &self.fixed[ai] {
                obj.push((self.agent_var(ai), -mv.clone()));
            }
        }
        obj.push((self.beta_var(), -(&self.opt * &flip)));
        lp.set_objective(obj)?;
        Ok(lp)
    }

    fn cut_constraint(&self, members: &[usize], vertex: usize) -> Constraint {
        let mut inside = vec![false; self.instance.graph.vertex_count()];
        for &v in members {
            inside[v] = true;
        }
        let mut coeffs: Vec<(usize, Rational)> =
            self.instance.out_cut(&inside).into_iter().map(|e| (e, rat(1))).collect();
        let agents = self.instance.agents();
        let ai = agents.iter().position(|&a| a == vertex).expect("cut member is an agent");
        match self.series {
            CutSeries::Floor => coeffs.push((self.agent_var(ai), rat(-1))),
            CutSeries::Ceiling => coeffs.push((self.agent_var(ai), rat(1))),
        }
        coeffs.push((self.beta_var(), rat(-1)));
        Constraint { coeffs, relation: Relation::Ge, rhs: Rational::zero() }
    }

    /// Constraint generation for this round, reusing and growing the shared
    /// cut pool.
    fn solve(&self, pool: &mut Vec<(Vec<usize>, usize)>) -> Result<LpSolution, BranchingGameError> {
        let mut lp = self.build_lp()?;
        for (members, vertex) in pool.iter() {
            let c = self.cut_constraint(members, *vertex);
            lp.add_constraint(c.coeffs, c.relation, c.rhs)?;
        }
        let m = self.instance.graph.edge_count();
        let n_agents = self.instance.agent_count();
        let mut new_cuts: Vec<(Vec<usize>, usize)> = Vec::new();
        let sol = {
            let mut oracle = |point: &[Rational]| {
                let z_edges = &point[..m];
                let z_vertices = &point[m..m + n_agents];
                let beta = point[m + n_agents].clone();
                match separation_oracle(self.instance, z_edges, z_vertices, &beta, self.series) {
                    Ok(OracleVerdict::Feasible) => Ok(SeparationResult::Feasible),
                    Ok(OracleVerdict::Violated { members, vertex }) => {
                        new_cuts.push((members.clone(), vertex));
                        Ok(SeparationResult::Violated(self.cut_constraint(&members, vertex)))
                    }
                    Err(e) => Err(LpError::Internal(format!("separation oracle failed: {e}"))),
                }
            };
            let rounds = 40 * (m + n_agents + 4);
            solve_with_separation(&lp, &mut oracle, Some(rounds))?
        };
        pool.append(&mut new_cuts);
        Ok(sol)
    }
}

fn initial_bound(instance: &BranchingInstance, opt: &Rational) -> Rational {
    let cost_sum: Rational = instance.costs.iter().cloned().sum();
    (rat(1) + cost_sum + opt.abs()) * rat(4)
}

/// Optimum and per-agent duals of a single share-fixing round under the
/// given fixed shares, solved by constraint generation. Exposed so the
/// cut-generated value can be compared against explicitly enumerated LPs.
pub fn series_round_optimum(
    instance: &BranchingInstance,
    fixed: &[Option<Rational>],
    series: CutSeries,
) -> Result<(Rational, Vec<Rational>), BranchingGameError> {
    let opt = instance.worth()?;
    let n_agents = instance.agent_count();
    assert_eq!(fixed.len(), n_agents);
    let mut bound = initial_bound(instance, &opt);
    let mut pool: Vec<(Vec<usize>, usize)> = Vec::new();
    for _attempt in 0..5 {
        let round = SeriesRound {
            instance,
            series,
            fixed: fixed.to_vec(),
            bound: bound.clone(),
            opt: opt.clone(),
        };
        let sol = round.solve(&mut pool)?;
        if sol.status != LpStatus::Optimal {
            return Err(BranchingGameError::Internal(format!(
                "cut-series relaxation came back {:?}",
                sol.status
            )));
        }
        if sol.primal[round.beta_var()].abs() == bound {
            bound = &bound * rat(4);
            continue;
        }
        let alpha = sol.objective.clone().expect("optimal solve carries an objective");
        let duals = (0..n_agents).map(|ai| sol.primal[round.agent_var(ai)].clone()).collect();
        return Ok((alpha, duals));
    }
    Err(BranchingGameError::BoxExhausted(bound))
}

/// Iterative cut-series share fixing shared by leximin and leximax.
fn owen_series(
    instance: &BranchingInstance,
    series: CutSeries,
) -> Result<Imputation, BranchingGameError> {
    let opt = instance.worth()?;
    let n_agents = instance.agent_count();
    let mut bound = initial_bound(instance, &opt);
    let mut pool: Vec<(Vec<usize>, usize)> = Vec::new();

    'retry: for _attempt in 0..5 {
        let mut fixed: Vec<Option<Rational>> = vec![None; n_agents];
        while fixed.iter().any(Option::is_none) {
            let round = SeriesRound {
                instance,
                series,
                fixed: fixed.clone(),
                bound: bound.clone(),
                opt: opt.clone(),
            };
            let sol = round.solve(&mut pool)?;
            if sol.status != LpStatus::Optimal {
                return Err(BranchingGameError::Internal(format!(
                    "cut-series relaxation came back {:?}",
                    sol.status
                )));
            }
            // A solution pressed against the box is meaningless: grow it.
            let mut box_tight = sol.primal[round.beta_var()].abs() == bound;
            for ai in 0..n_agents {
                if fixed[ai].is_some() && sol.primal[round.agent_var(ai)].abs() == bound {
                    box_tight = true;
                }
            }
            if box_tight {
                bound = &bound * rat(4);
                continue 'retry;
            }

            let alpha = sol.objective.clone().expect("optimal solve carries an objective");
            let mut any = false;
            for ai in 0..n_agents {
                if fixed[ai].is_none() && sol.primal[round.agent_var(ai)] > Rational::zero() {
                    fixed[ai] = Some(alpha.clone());
                    any = true;
                }
            }
            if !any {
                return Err(BranchingGameError::NoPositiveDual);
            }
        }
        let shares: Imputation = fixed.into_iter().map(|f| f.expect("all fixed")).collect();
        let total: Rational = shares.iter().cloned().sum();
        if total != opt {
            return Err(BranchingGameError::Internal(format!(
                "shares sum to {total}, worth is {opt}"
            )));
        }
        return Ok(shares);
    }
    Err(BranchingGameError::BoxExhausted(bound))
}

/// Leximin Owen cost-share: iteratively raises the minimum share, fixing
/// every agent whose dual is positive at the round's optimum.
pub fn leximin_owen(instance: &BranchingInstance) -> Result<Imputation, BranchingGameError> {
    owen_series(instance, CutSeries::Floor)
}

/// Leximax Owen cost-share: the mirrored series lowering the maximum share.
pub fn leximax_owen(instance: &BranchingInstance) -> Result<Imputation, BranchingGameError> {
    owen_series(instance, CutSeries::Ceiling)
}

/// An arbitrary Owen cost-share (no fairness objective): solve the covering
/// relaxation of the branching problem by constraint generation, read the
/// optimal duals of the generated cut rows as a packing `y(S)`, and split
/// each set's weight evenly among its members.
pub fn arbitrary_owen(instance: &BranchingInstance) -> Result<Imputation, BranchingGameError> {
    let opt = instance.worth()?;
    let m = instance.graph.edge_count();
    let mut lp = LinearProgram::new(Sense::Minimize);
    for e in 0..m {
        lp.add_var(format!("x_{e}"), VarKind::NonNeg);
    }
    lp.set_objective((0..m).map(|e| (e, instance.costs[e].clone())).collect())?;

    let mut generated: Vec<Vec<usize>> = Vec::new();
    let ones = vec![rat(1); instance.agent_count()];
    let sol = {
        let mut oracle = |point: &[Rational]| {
            match separation_oracle(instance, point, &ones, &Rational::zero(), CutSeries::Floor) {
                Ok(OracleVerdict::Feasible) => Ok(SeparationResult::Feasible),
                Ok(OracleVerdict::Violated { members, .. }) => {
                    let mut inside = vec![false; instance.graph.vertex_count()];
                    for &v in &members {
                        inside[v] = true;
                    }
                    let coeffs: Vec<(usize, Rational)> =
                        instance.out_cut(&inside).into_iter().map(|e| (e, rat(1))).collect();
                    generated.push(members);
                    Ok(SeparationResult::Violated(Constraint {
                        coeffs,
                        relation: Relation::Ge,
                        rhs: rat(1),
                    }))
                }
                Err(e) => Err(LpError::Internal(format!("separation oracle failed: {e}"))),
            }
        };
        solve_with_separation(&lp, &mut oracle, Some(40 * (m + instance.agent_count() + 4)))?
    };
    if sol.status != LpStatus::Optimal {
        return Err(BranchingGameError::Internal(format!(
            "covering relaxation came back {:?}",
            sol.status
        )));
    }
    let lp_opt = sol.objective.expect("optimal solve carries an objective");
    if lp_opt != opt {
        return Err(BranchingGameError::Internal(format!(
            "covering relaxation pays {lp_opt}, branching costs {opt}"
        )));
    }
    let agents = instance.agents();
    let mut shares = vec![Rational::zero(); agents.len()];
    for (row, members) in generated.iter().enumerate() {
        let y = &sol.duals[row];
        if y.is_zero() {
            continue;
        }
        debug_assert!(y.is_positive());
        let per_member = y / rat(members.len() as i64);
        for &v in members {
            let ai = agents.iter().position(|&a| a == v).expect("cut members are agents");
            shares[ai] += &per_member;
        }
    }
    let total: Rational = shares.iter().cloned().sum();
    if total != opt {
        return Err(BranchingGameError::Internal(format!(
            "split shares sum to {total}, worth is {opt}"
        )));
    }
    Ok(shares)
}

/// Leximin cost-shares through the concise series: cut constraints only for
/// sets whose out-cut meets a fixed minimum branching in exactly one edge
/// ("contiguous" sets). Agrees exactly with [`leximin_owen`]; kept as an
/// independent cross-check path.
///
/// The total cost-share must stay pinned to the branching cost even over
/// the restricted family: without the pin the series can trade total mass
/// for a higher minimum and undershoot the worth (a 6-agent instance with
/// zero-cost non-tree edges does exactly that), so the `beta` offset stays.
///
/// Separation fixes one tree edge `(u, w)` at a time and asks, inside the
/// subgraph around the descendants of `u`, whether some member `v` of a
/// contiguous set through `(u, w)` has a max-flow to `w` below
/// `z(v) + beta`. Remaining tree edges are made uncuttable by saturating
/// them, as are escape routes from outside neighbors back to `w`.
pub fn leximin_owen_concise(instance: &BranchingInstance) -> Result<Imputation, BranchingGameError> {
    let (tree, opt) = instance.min_cost_branching()?;
    let n = instance.graph.vertex_count();
    let agents = instance.agents();
    let n_agents = agents.len();
    let m = instance.graph.edge_count();

    // parent structure of the in-branching
    let mut tree_out: Vec<Option<usize>> = vec![None; n];
    for &e in &tree {
        let t = instance.graph.tail(e);
        if tree_out[t].is_some() {
            return Err(BranchingGameError::Internal("branching reuses a tail".into()));
        }
        tree_out[t] = Some(e);
    }
    let is_tree_edge = {
        let mut v = vec![false; m];
        for &e in &tree {
            v[e] = true;
        }
        v
    };
    // descendants[u] = vertices whose tree path to the root passes u.
    let descendants = |u: usize| -> Vec<bool> {
        let mut inside = vec![false; n];
        for v in 0..n {
            if v == instance.root() {
                continue;
            }
            let mut x = v;
            loop {
                if x == u {
                    inside[v] = true;
                    break;
                }
                match tree_out[x] {
                    Some(e) => x = instance.graph.head(e),
                    None => break,
                }
                if x == instance.root() {
                    break;
                }
            }
        }
        inside[u] = true;
        inside
    };

    let mut bound = initial_bound(instance, &opt);
    let mut pool: Vec<(Vec<usize>, usize)> = Vec::new();

    'retry: for _attempt in 0..5 {
        let mut fixed: Vec<Option<Rational>> = vec![None; n_agents];
        while fixed.iter().any(Option::is_none) {
            let mut lp = LinearProgram::new(Sense::Minimize);
            for e in 0..m {
                lp.add_var(format!("ze_{e}"), VarKind::NonNeg);
            }
            for (ai, v) in agents.iter().enumerate() {
                let kind = if fixed[ai].is_some() { VarKind::Free } else { VarKind::NonNeg };
                lp.add_var(format!("zv_{v}"), kind);
            }
            let zpos = |ai: usize| m + ai;
            let beta = lp.add_var("beta", VarKind::Free);
            let norm: Vec<(usize, Rational)> = (0..n_agents)
                .filter(|&ai| fixed[ai].is_none())
                .map(|ai| (zpos(ai), rat(1)))
                .collect();
            lp.add_constraint(norm, Relation::Eq, rat(1))?;
            lp.add_constraint(vec![(beta, rat(1))], Relation::Le, bound.clone())?;
            lp.add_constraint(vec![(beta, rat(-1))], Relation::Le, bound.clone())?;
            let mut obj: Vec<(usize, Rational)> =
                (0..m).map(|e| (e, instance.costs[e].clone())).collect();
            for ai in 0..n_agents {
                if let Some(mv) = &fixed[ai] {
                    obj.push((zpos(ai), -mv.clone()));
                    lp.add_constraint(vec![(zpos(ai), rat(1))], Relation::Le, bound.clone())?;
                    lp.add_constraint(vec![(zpos(ai), rat(-1))], Relation::Le, bound.clone())?;
                }
            }
            obj.push((beta, -opt.clone()));
            lp.set_objective(obj)?;
            let cut_row = |members: &[usize], vertex: usize| {
                let mut inside = vec![false; n];
                for &v in members {
                    inside[v] = true;
                }
                let mut coeffs: Vec<(usize, Rational)> =
                    instance.out_cut(&inside).into_iter().map(|e| (e, rat(1))).collect();
                let ai = agents.iter().position(|&a| a == vertex).expect("agent");
                coeffs.push((zpos(ai), rat(-1)));
                coeffs.push((beta, rat(-1)));
                coeffs
            };
            for (members, vertex) in pool.iter() {
                lp.add_constraint(cut_row(members, *vertex), Relation::Ge, Rational::zero())?;
            }

            let mut new_cuts: Vec<(Vec<usize>, usize)> = Vec::new();
            let sol = {
                let mut oracle = |point: &[Rational]| {
                    let z_edges = &point[..m];
                    let z_vertices = &point[m..m + n_agents];
                    let beta_val = point[beta].clone();
                    match separate_contiguous(
                        instance,
                        &tree,
                        &is_tree_edge,
                        &descendants,
                        z_edges,
                        z_vertices,
                        &beta_val,
                    ) {
                        Ok(None) => Ok(SeparationResult::Feasible),
                        Ok(Some((members, vertex))) => {
                            let coeffs = cut_row(&members, vertex);
                            new_cuts.push((members, vertex));
                            Ok(SeparationResult::Violated(Constraint {
                                coeffs,
                                relation: Relation::Ge,
                                rhs: Rational::zero(),
                            }))
                        }
                        Err(e) => Err(LpError::Internal(format!("separation failed: {e}"))),
                    }
                };
                solve_with_separation(&lp, &mut oracle, Some(40 * (m + n_agents + 4)))?
            };
            pool.append(&mut new_cuts);
            if sol.status != LpStatus::Optimal {
                return Err(BranchingGameError::Internal(format!(
                    "concise relaxation came back {:?}",
                    sol.status
                )));
            }
            let mut box_tight = sol.primal[beta].abs() == bound;
            for ai in 0..n_agents {
                if fixed[ai].is_some() && sol.primal[zpos(ai)].abs() == bound {
                    box_tight = true;
                }
            }
            if box_tight {
                bound = &bound * rat(4);
                continue 'retry;
            }
            let alpha = sol.objective.clone().expect("optimal solve carries an objective");
            let mut any = false;
            for ai in 0..n_agents {
                if fixed[ai].is_none() && sol.primal[zpos(ai)] > Rational::zero() {
                    fixed[ai] = Some(alpha.clone());
                    any = true;
                }
            }
            if !any {
                return Err(BranchingGameError::NoPositiveDual);
            }
        }
        let shares: Imputation = fixed.into_iter().map(|f| f.expect("all fixed")).collect();
        let total: Rational = shares.iter().cloned().sum();
        if total != opt {
            return Err(BranchingGameError::Internal(format!(
                "concise shares sum to {total}, worth is {opt}"
            )));
        }
        return Ok(shares);
    }
    Err(BranchingGameError::BoxExhausted(bound))
}

/// One violated (contiguous set, member) pair, if any.
fn separate_contiguous(
    instance: &BranchingInstance,
    tree: &[usize],
    is_tree_edge: &[bool],
    descendants: &dyn Fn(usize) -> Vec<bool>,
    z_edges: &[Rational],
    z_vertices: &[Rational],
    beta: &Rational,
) -> Result<Option<(Vec<usize>, usize)>, BranchingGameError> {
    let n = instance.graph.vertex_count();
    let agents = instance.agents();
    let saturate: Rational = z_edges.iter().cloned().sum::<Rational>()
        + z_vertices
            .iter()
            .map(|z| if z.is_positive() { z.clone() } else { Rational::zero() })
            .sum::<Rational>()
        + beta.abs()
        + rat(1);

    for &tree_e in tree {
        let u = instance.graph.tail(tree_e);
        let w = instance.graph.head(tree_e);
        let inside = descendants(u);

        // Neighborhood: outside vertices touching the descendant set.
        let mut in_h = inside.clone();
        for (_, t, h) in instance.graph.edges() {
            if inside[t] && !inside[h] {
                in_h[h] = true;
            }
            if inside[h] && !inside[t] {
                in_h[t] = true;
            }
        }
        in_h[w] = true;

        // Build the auxiliary flow graph on the original vertex ids.
        let mut aux = DiGraph::new(n);
        let mut caps: Vec<Rational> = Vec::new();
        for (e, t, h) in instance.graph.edges() {
            if !in_h[t] || !in_h[h] {
                continue;
            }
            if !inside[t] && !inside[h] {
                continue; // both endpoints outside the descendant set
            }
            aux.add_edge(t, h).map_err(BranchingGameError::from)?;
            caps.push(if is_tree_edge[e] && e != tree_e {
                saturate.clone()
            } else {
                z_edges[e].clone()
            });
        }
        for v in 0..n {
            if in_h[v] && !inside[v] && v != w {
                aux.add_edge(v, w).map_err(BranchingGameError::from)?;
                caps.push(saturate.clone());
            }
        }
        let cap_map = CapacityMap::new(&aux, caps)?;

        for (ai, &v) in agents.iter().enumerate() {
            let threshold = &z_vertices[ai] + beta;
            if !inside[v] || threshold <= Rational::zero() {
                continue;
            }
            let flow = max_flow(&aux, &cap_map, v, w)?;
            if flow.value < threshold {
                let side = min_vertex_cut_side(&aux, &cap_map, &flow, v);
                let members: Vec<usize> = side.into_iter().filter(|&x| inside[x]).collect();
                debug_assert!(members.contains(&v));
                return Ok(Some((members, v)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OwenMembership {
    Yes,
    No,
}

/// Decides whether `shares` is an Owen cost-share, i.e. whether some
/// feasible dual packing splits into exactly these per-agent amounts.
///
/// The split system has a variable per (set, member) pair, so feasibility is
/// decided through its dual cone: the system is feasible iff
/// `sum_e c(e) z(e) + sum_v p(v) z(v)` is nonnegative over the cone
/// `sum_{e in cut(S)} z(e) + z(v) >= 0` for all sets and members, with
/// `z(e) >= 0`. The cone is truncated by a unit simplex so that constraint
/// generation applies; a strictly negative optimum is an exact
/// infeasibility certificate.
pub fn check_owen_membership(
    instance: &BranchingInstance,
    shares: &[Rational],
) -> Result<OwenMembership, BranchingGameError> {
    let opt = instance.worth()?;
    if shares.len() != instance.agent_count() {
        return Err(BranchingGameError::NotAnImputation(format!(
            "expected {} shares, got {}",
            instance.agent_count(),
            shares.len()
        )));
    }
    if let Some(i) = shares.iter().position(|p| p.is_negative()) {
        return Err(BranchingGameError::NotAnImputation(format!("share {i} is negative")));
    }
    let total: Rational = shares.iter().cloned().sum();
    if total != opt {
        return Err(BranchingGameError::NotAnImputation(format!(
            "shares sum to {total}, minimum branching cost is {opt}"
        )));
    }

    let m = instance.graph.edge_count();
    let n_agents = instance.agent_count();
    let mut lp = LinearProgram::new(Sense::Minimize);
    for e in 0..m {
        lp.add_var(format!("ze_{e}"), VarKind::NonNeg);
    }
    // Vertex multipliers are free; split them explicitly so the simplex
    // truncation sees their magnitudes.
    for v in instance.agents() {
        lp.add_var(format!("zvp_{v}"), VarKind::NonNeg);
        lp.add_var(format!("zvn_{v}"), VarKind::NonNeg);
    }
    let zvp = |ai: usize| m + 2 * ai;
    let zvn = |ai: usize| m + 2 * ai + 1;

    let mut norm: Vec<(usize, Rational)> = (0..m).map(|e| (e, rat(1))).collect();
    for ai in 0..n_agents {
        norm.push((zvp(ai), rat(1)));
        norm.push((zvn(ai), rat(1)));
    }
    lp.add_constraint(norm, Relation::Le, rat(1))?;

    let mut obj: Vec<(usize, Rational)> = (0..m).map(|e| (e, instance.costs[e].clone())).collect();
    for ai in 0..n_agents {
        obj.push((zvp(ai), shares[ai].clone()));
        obj.push((zvn(ai), -shares[ai].clone()));
    }
    lp.set_objective(obj)?;

    let agents = instance.agents();
    let mut oracle = |point: &[Rational]| {
        let z_edges = &point[..m];
        let z_vertices: Vec<Rational> =
            (0..n_agents).map(|ai| &point[zvp(ai)] - &point[zvn(ai)]).collect();
        match separation_oracle(
            instance,
            z_edges,
            &z_vertices,
            &Rational::zero(),
            CutSeries::Ceiling,
        ) {
            Ok(OracleVerdict::Feasible) => Ok(SeparationResult::Feasible),
            Ok(OracleVerdict::Violated { members, vertex }) => {
                let mut inside = vec![false; instance.graph.vertex_count()];
                for &v in &members {
                    inside[v] = true;
                }
                let mut coeffs: Vec<(usize, Rational)> =
                    instance.out_cut(&inside).into_iter().map(|e| (e, rat(1))).collect();
                let ai = agents.iter().position(|&a| a == vertex).expect("agent");
                coeffs.push((zvp(ai), rat(1)));
                coeffs.push((zvn(ai), rat(-1)));
                Ok(SeparationResult::Violated(Constraint {
                    coeffs,
                    relation: Relation::Ge,
                    rhs: Rational::zero(),
                }))
            }
            Err(e) => Err(LpError::Internal(format!("separation oracle failed: {e}"))),
        }
    };
    let sol = solve_with_separation(&lp, &mut oracle, Some(40 * (m + n_agents + 4)))?;
    if sol.status != LpStatus::Optimal {
        return Err(BranchingGameError::Internal(format!(
            "membership relaxation came back {:?}",
            sol.status
        )));
    }
    let optimum = sol.objective.expect("optimal solve carries an objective");
    if optimum.is_negative() {
        Ok(OwenMembership::No)
    } else {
        Ok(OwenMembership::Yes)
    }
}

//! The max-flow game: one agent per edge, worth = maximum s-t flow.
//!
//! Owen imputations pay each edge `capacity * length` under an optimal dual
//! `(potentials, lengths)` of the flow LP. The combinatorial leximin works
//! on the condensation of the residual graph under a fixed max-flow (the
//! Picard-Queyranne representation of all minimum cuts): potentials of the
//! source and sink components are pinned to 1 and 0, and the remaining
//! component potentials are fixed path by path, always taking the free path
//! whose potential drop per unit of `1/capacity`-length is smallest.
//!
//! Edge-direction bookkeeping is the error-prone part: a saturated original
//! edge `(i, j)` survives in the condensation as the *reverse* residual edge
//! `(j, i)`, so full-flow DAG edges carry reversed orientation while
//! zero-flow DAG edges keep the original one. Lengths and profits always
//! attach to the original edge id.

use num_traits::Zero;
use thiserror::Error;

use super::Imputation;
use crate::graph::{
    classify_edges, condense_scc, max_flow, residual_graph, CapacityMap, CondensationDag, DiGraph,
    EdgeClass, FlowResult, GraphError, ResidualGraph,
};
use crate::leximin::{self, LeximinError, LeximinProblem, LeximinResult, TrackedShare};
use crate::lp::{LinearProgram, Relation, Sense, VarKind};
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaxFlowGameError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge {0} has zero capacity; zero-capacity edges are rejected at instance level")]
    ZeroCapacity(usize),
    #[error("not an imputation: {0}")]
    NotAnImputation(String),
    #[error("dual is not optimal: objective {objective} differs from game worth {worth}")]
    NotOptimalDual { objective: Rational, worth: Rational },
    #[error("dual is infeasible: {0}")]
    InfeasibleDual(String),
    #[error(transparent)]
    Engine(#[from] LeximinError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A max-flow game instance. Agents are the edges, in edge-id order.
#[derive(Debug, Clone)]
pub struct MaxFlowInstance {
    graph: DiGraph,
    capacities: CapacityMap,
    source: usize,
    sink: usize,
}

impl MaxFlowInstance {
    pub fn new(
        graph: DiGraph,
        capacities: CapacityMap,
        source: usize,
        sink: usize,
    ) -> Result<Self, MaxFlowGameError> {
        for v in [source, sink] {
            if v >= graph.vertex_count() {
                return Err(GraphError::InvalidVertex(v, graph.vertex_count()).into());
            }
        }
        if source == sink {
            return Err(GraphError::SourceIsSink.into());
        }
        if let Some(e) = (0..graph.edge_count()).find(|&e| capacities.get(e).is_zero()) {
            return Err(MaxFlowGameError::ZeroCapacity(e));
        }
        if capacities.values().len() != graph.edge_count() {
            return Err(GraphError::CapacityLenMismatch(
                capacities.values().len(),
                graph.edge_count(),
            )
            .into());
        }
        Ok(MaxFlowInstance { graph, capacities, source, sink })
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn capacities(&self) -> &CapacityMap {
        &self.capacities
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn agent_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn worth(&self) -> Result<Rational, MaxFlowGameError> {
        Ok(self.max_flow()?.value)
    }

    pub fn max_flow(&self) -> Result<FlowResult, MaxFlowGameError> {
        Ok(max_flow(&self.graph, &self.capacities, self.source, self.sink)?)
    }
}

/// An optimal dual of the flow LP: a potential per vertex and a length per
/// edge, with `length_ij >= potential_i - potential_j`, both nonnegative,
/// and a unit potential drop from source to sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowDual {
    pub potentials: Vec<Rational>,
    pub lengths: Vec<Rational>,
}

impl FlowDual {
    pub fn objective(&self, instance: &MaxFlowInstance) -> Rational {
        self.lengths
            .iter()
            .enumerate()
            .map(|(e, d)| d * instance.capacities.get(e))
            .sum()
    }

    /// Exact feasibility check against the dual constraints.
    pub fn check_feasible(&self, instance: &MaxFlowInstance) -> Result<(), String> {
        let g = &instance.graph;
        if self.potentials.len() != g.vertex_count() || self.lengths.len() != g.edge_count() {
            return Err("dual has wrong dimensions".into());
        }
        if let Some(v) = self.potentials.iter().position(|p| p < &Rational::zero()) {
            return Err(format!("potential of vertex {v} is negative"));
        }
        if let Some(e) = self.lengths.iter().position(|d| d < &Rational::zero()) {
            return Err(format!("length of edge {e} is negative"));
        }
        for (e, i, j) in g.edges() {
            if &self.lengths[e] - &self.potentials[i] + &self.potentials[j] < Rational::zero() {
                return Err(format!("edge {e} drops more potential than its length"));
            }
        }
        if &self.potentials[instance.source] - &self.potentials[instance.sink] < rat(1) {
            return Err("source-sink potential drop below one".into());
        }
        Ok(())
    }
}

/// Owen imputation induced by an optimal dual: each edge is paid
/// `capacity * length`.
pub fn owen_from_dual(
    instance: &MaxFlowInstance,
    dual: &FlowDual,
) -> Result<Imputation, MaxFlowGameError> {
    dual.check_feasible(instance).map_err(MaxFlowGameError::InfeasibleDual)?;
    let worth = instance.worth()?;
    let objective = dual.objective(instance);
    if objective != worth {
        return Err(MaxFlowGameError::NotOptimalDual { objective, worth });
    }
    Ok((0..instance.agent_count())
        .map(|e| instance.capacities.get(e) * &dual.lengths[e])
        .collect())
}

/// How a condensation edge relates to the original graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DagEdgeKind {
    /// Reversed copy of original edge `edge`, which carries full flow.
    FullFlow { edge: usize },
    /// Same-direction copy of original edge `edge`, which carries zero flow.
    ZeroFlow { edge: usize },
}

impl DagEdgeKind {
    pub fn original_edge(&self) -> usize {
        match *self {
            DagEdgeKind::FullFlow { edge } | DagEdgeKind::ZeroFlow { edge } => edge,
        }
    }
}

/// Condensation of the residual graph under one fixed max-flow; its closed
/// vertex sets are exactly the minimum s-t cuts (Picard-Queyranne). Every
/// surviving edge is either a reversed full-flow edge or a forward zero-flow
/// edge, and all essential edges of the instance survive.
#[derive(Debug, Clone)]
pub struct MinCutDag {
    pub flow: FlowResult,
    pub residual: ResidualGraph,
    pub cond: CondensationDag,
    pub source_comp: usize,
    pub sink_comp: usize,
    pub edge_kinds: Vec<DagEdgeKind>,
    /// Free-path length per DAG edge: `1/capacity` on full-flow edges, else 0.
    pub lengths: Vec<Rational>,
}

pub fn build_min_cut_dag(instance: &MaxFlowInstance) -> Result<MinCutDag, MaxFlowGameError> {
    let flow = instance.max_flow()?;
    let residual = residual_graph(&instance.graph, &instance.capacities, &flow);
    let cond = condense_scc(&residual.graph);
    let source_comp = cond.component_of[instance.source];
    let sink_comp = cond.component_of[instance.sink];

    let mut edge_kinds = Vec::with_capacity(cond.dag.edge_count());
    let mut lengths = Vec::with_capacity(cond.dag.edge_count());
    for dag_e in 0..cond.dag.edge_count() {
        let res_e = cond.edge_source[dag_e];
        let origin = residual.origin[res_e];
        let orig = origin.edge_id();
        let kind = if origin.is_reverse() {
            if flow.flow[orig] != *instance.capacities.get(orig) {
                return Err(MaxFlowGameError::Internal(
                    "surviving reverse edge must carry full flow".into(),
                ));
            }
            DagEdgeKind::FullFlow { edge: orig }
        } else {
            if !flow.flow[orig].is_zero() {
                return Err(MaxFlowGameError::Internal(
                    "surviving forward edge must carry zero flow".into(),
                ));
            }
            DagEdgeKind::ZeroFlow { edge: orig }
        };
        lengths.push(match kind {
            DagEdgeKind::FullFlow { edge } => {
                Rational::from_integer(1.into()) / instance.capacities.get(edge)
            }
            DagEdgeKind::ZeroFlow { .. } => Rational::zero(),
        });
        edge_kinds.push(kind);
    }
    Ok(MinCutDag { flow, residual, cond, source_comp, sink_comp, edge_kinds, lengths })
}

/// Longest free path from `from`: interior vertices must all be free.
/// Fixed vertices may terminate a path but never extend one, and the direct
/// hops `from -> fixed` are excluded so every reported path holds at least
/// one free vertex to fix.
struct FreePaths {
    distance: Vec<Option<Rational>>,
    predecessor: Vec<Option<(usize, usize)>>,
}

fn longest_free_paths(dag: &MinCutDag, fixed: &[Option<Rational>], from: usize) -> FreePaths {
    let n = dag.cond.dag.vertex_count();
    let adj = dag.cond.dag.out_edges();
    let mut distance: Vec<Option<Rational>> = vec![None; n];
    let mut predecessor: Vec<Option<(usize, usize)>> = vec![None; n];
    distance[from] = Some(Rational::zero());
    // Component ids are topologically sorted already.
    for x in 0..n {
        if distance[x].is_none() {
            continue;
        }
        let x_is_source = x == from;
        if !x_is_source && fixed[x].is_some() {
            continue; // fixed vertices don't extend paths
        }
        let dx = distance[x].clone().expect("checked above");
        for &e in &adj[x] {
            let y = dag.cond.dag.head(e);
            if x_is_source && fixed[y].is_some() {
                continue; // direct fixed-to-fixed hop fixes nothing
            }
            let cand = &dx + &dag.lengths[e];
            let better = match &distance[y] {
                None => true,
                Some(cur) => {
                    cand > *cur
                        || (cand == *cur
                            && predecessor[y].map_or(true, |(pv, pe)| (x, e) < (pv, pe)))
                }
            };
            if better {
                distance[y] = Some(cand);
                predecessor[y] = Some((x, e));
            }
        }
    }
    FreePaths { distance, predecessor }
}

/// Combinatorial leximin Owen imputation, with the optimal dual that
/// produces it.
pub fn leximin_owen(
    instance: &MaxFlowInstance,
) -> Result<(Imputation, FlowDual), MaxFlowGameError> {
    let dag = build_min_cut_dag(instance)?;
    let worth = dag.flow.value.clone();

    if worth.is_zero() {
        // Zero-worth game: everyone gets zero. Potentials 1 on everything
        // the source reaches, 0 elsewhere, form an optimal dual.
        let reach = reachable_set(&instance.graph, instance.source);
        let potentials: Vec<Rational> =
            (0..instance.graph.vertex_count()).map(|v| rat(i64::from(reach[v]))).collect();
        let lengths = vec![Rational::zero(); instance.agent_count()];
        let dual = FlowDual { potentials, lengths };
        let imputation = owen_from_dual(instance, &dual)?;
        return Ok((imputation, dual));
    }

    if dag.source_comp == dag.sink_comp {
        return Err(MaxFlowGameError::Internal(
            "source and sink share a residual component despite positive worth".into(),
        ));
    }

    let nc = dag.cond.component_count();
    let mut potential: Vec<Option<Rational>> = vec![None; nc];
    potential[dag.source_comp] = Some(rat(1));
    potential[dag.sink_comp] = Some(Rational::zero());

    let mut last_alpha: Option<Rational> = None;
    loop {
        let fixed_ids: Vec<usize> =
            (0..nc).filter(|&c| potential[c].is_some()).collect();
        if fixed_ids.len() == nc {
            break;
        }

        // Best candidate: (alpha, from, to, free-path data), smallest wins.
        let mut best: Option<(Rational, usize, usize, Vec<usize>)> = None;
        for &a in &fixed_ids {
            let pa = potential[a].clone().expect("a is fixed");
            let paths = longest_free_paths(&dag, &potential, a);
            for &b in &fixed_ids {
                if b == a {
                    continue;
                }
                let pb = potential[b].clone().expect("b is fixed");
                if pa >= pb {
                    continue;
                }
                let Some(total_len) = paths.distance[b].clone() else { continue };
                if total_len.is_zero() {
                    continue; // pure zero-flow path: no finite ratio to bind
                }
                let alpha = (&pb - &pa) / &total_len;
                let take = match &best {
                    None => true,
                    Some((ba, bfa, bfb, _)) => {
                        (alpha.clone(), a, b) < (ba.clone(), *bfa, *bfb)
                    }
                };
                if take {
                    // Reconstruct the path edge ids b <- a.
                    let mut edges_rev = Vec::new();
                    let mut cur = b;
                    while cur != a {
                        let (prev, e) =
                            paths.predecessor[cur].expect("reachable vertices have predecessors");
                        edges_rev.push(e);
                        cur = prev;
                    }
                    edges_rev.reverse();
                    best = Some((alpha, a, b, edges_rev));
                }
            }
        }

        let Some((alpha, a, _b, path_edges)) = best else {
            break; // only zero-flow debris remains; completed below
        };
        if let Some(prev) = &last_alpha {
            debug_assert!(
                alpha >= *prev,
                "free-path ratios must be non-decreasing across iterations"
            );
        }
        last_alpha = Some(alpha.clone());

        // Distribute the potential drop along the path proportionally to
        // the lengths, so every full-flow edge on it earns exactly alpha.
        let pa = potential[a].clone().expect("a is fixed");
        let mut prefix = Rational::zero();
        for (idx, &e) in path_edges.iter().enumerate() {
            prefix += &dag.lengths[e];
            let y = dag.cond.dag.head(e);
            if idx + 1 < path_edges.len() {
                let value = &pa + &alpha * &prefix;
                debug_assert!(potential[y].is_none(), "interior vertices are free");
                potential[y] = Some(value);
            } else {
                debug_assert_eq!(potential[y].clone().expect("endpoint fixed"), &pa + &alpha * &prefix);
            }
        }
    }

    // Any components never touched by a free path carry no flow; give each
    // the largest predecessor potential (zero when there is none) so every
    // condensation edge keeps a non-negative potential rise and zero-flow
    // edges keep zero profit.
    let in_adj = {
        let mut v = vec![Vec::new(); nc];
        for (e, t, h) in dag.cond.dag.edges() {
            v[h].push((t, e));
        }
        v
    };
    for c in 0..nc {
        if potential[c].is_some() {
            continue;
        }
        let mut val = Rational::zero();
        for &(t, _) in &in_adj[c] {
            if let Some(pt) = &potential[t] {
                if *pt > val {
                    val = pt.clone();
                }
            }
        }
        potential[c] = Some(val);
    }

    let comp_potential: Vec<Rational> =
        potential.into_iter().map(|p| p.expect("all components assigned")).collect();

    // Potentials must never fall along condensation edges.
    for (e, t, h) in dag.cond.dag.edges() {
        if comp_potential[t] > comp_potential[h] {
            return Err(MaxFlowGameError::Internal(format!(
                "potential falls along condensation edge {e}"
            )));
        }
    }

    let dual = extend_dual(instance, &dag.cond, &comp_potential);
    dual.check_feasible(instance).map_err(MaxFlowGameError::InfeasibleDual)?;
    let objective = dual.objective(instance);
    if objective != worth {
        return Err(MaxFlowGameError::Internal(format!(
            "constructed dual pays {objective}, game worth is {worth}"
        )));
    }
    let imputation = owen_from_dual(instance, &dual)?;
    Ok((imputation, dual))
}

fn reachable_set(graph: &DiGraph, from: usize) -> Vec<bool> {
    let adj = graph.out_edges();
    let mut seen = vec![false; graph.vertex_count()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        for &e in &adj[v] {
            let h = graph.head(e);
            if !seen[h] {
                seen[h] = true;
                stack.push(h);
            }
        }
    }
    seen
}

/// Potentials on components extended to all vertices, with lengths derived
/// as the positive part of the potential drop.
fn extend_dual(
    instance: &MaxFlowInstance,
    cond: &CondensationDag,
    comp_potential: &[Rational],
) -> FlowDual {
    let potentials: Vec<Rational> = (0..instance.graph.vertex_count())
        .map(|v| comp_potential[cond.component_of[v]].clone())
        .collect();
    let lengths: Vec<Rational> = instance
        .graph
        .edges()
        .map(|(_, i, j)| {
            let drop = &potentials[i] - &potentials[j];
            if drop > Rational::zero() {
                drop
            } else {
                Rational::zero()
            }
        })
        .collect();
    FlowDual { potentials, lengths }
}

/// Flow dual LP: minimize total `capacity * length` subject to lengths
/// covering potential drops and a unit source-sink drop. Variable order:
/// potentials `0..n`, then lengths `n..n+m`.
pub fn dual_lp(instance: &MaxFlowInstance) -> LinearProgram {
    let g = &instance.graph;
    let n = g.vertex_count();
    let mut lp = LinearProgram::new(Sense::Minimize);
    for v in 0..n {
        lp.add_var(format!("pot_{v}"), VarKind::NonNeg);
    }
    for e in 0..g.edge_count() {
        lp.add_var(format!("len_{e}"), VarKind::NonNeg);
    }
    for (e, i, j) in g.edges() {
        // potential_i - potential_j - length_e <= 0
        lp.add_constraint(
            vec![(i, rat(1)), (j, rat(-1)), (n + e, rat(-1))],
            Relation::Le,
            Rational::zero(),
        )
        .expect("indices in range");
    }
    lp.add_constraint(
        vec![(instance.source, rat(1)), (instance.sink, rat(-1))],
        Relation::Ge,
        rat(1),
    )
    .expect("indices in range");
    lp.set_objective(
        (0..g.edge_count()).map(|e| (n + e, instance.capacities.get(e).clone())).collect(),
    )
    .expect("indices in range");
    lp
}

/// Leximin problem over the dual LP with one tracked share per edge:
/// `capacity_e * length_e`.
pub fn leximin_problem(instance: &MaxFlowInstance) -> LeximinProblem {
    let n = instance.graph.vertex_count();
    let tracked = (0..instance.agent_count())
        .map(|e| {
            TrackedShare::scaled_var(format!("edge_{e}"), n + e, instance.capacities.get(e).clone())
        })
        .collect();
    LeximinProblem { base: dual_lp(instance), tracked }
}

/// LP-series leximin; must agree exactly with [`leximin_owen`].
pub fn leximin_owen_lp(instance: &MaxFlowInstance) -> Result<Imputation, MaxFlowGameError> {
    let problem = leximin_problem(instance);
    Ok(leximin::leximin(&problem, None)?.shares)
}

/// LP-series leximax Owen imputation.
pub fn leximax_owen(instance: &MaxFlowInstance) -> Result<Imputation, MaxFlowGameError> {
    let problem = leximin_problem(instance);
    Ok(leximin::leximax(&problem, None)?.shares)
}

/// Full engine result (shares plus iteration log), for callers that want
/// the alpha sequence.
pub fn leximin_owen_lp_trace(
    instance: &MaxFlowInstance,
) -> Result<LeximinResult, MaxFlowGameError> {
    let problem = leximin_problem(instance);
    Ok(leximin::leximin(&problem, None)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OwenMembership {
    Yes(FlowDual),
    No(OwenRejection),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OwenRejection {
    /// An edge that is not saturated in every max-flow received profit.
    InessentialEdgePaid { edge: usize },
    /// The forced lengths admit no feasible potential assignment.
    NoFeasiblePotentials(String),
}

impl OwenRejection {
    pub fn describe(&self) -> String {
        match self {
            OwenRejection::InessentialEdgePaid { edge } => {
                format!("inessential edge {edge} paid")
            }
            OwenRejection::NoFeasiblePotentials(s) => s.clone(),
        }
    }
}

/// Decides whether `imputation` is induced by some optimal dual, returning
/// the dual as certificate when it is.
///
/// The lengths are forced (`length = profit / capacity`), every flow-carrying
/// edge must be tight, and the remaining freedom is a difference-constraint
/// system over residual components, solved exactly by shortest paths.
pub fn check_owen_membership(
    instance: &MaxFlowInstance,
    imputation: &[Rational],
) -> Result<OwenMembership, MaxFlowGameError> {
    let worth = instance.worth()?;
    validate_imputation(instance.agent_count(), imputation, &worth)?;

    let classes = classify_edges(&instance.graph, &instance.capacities, instance.source, instance.sink)?;
    for (e, class) in classes.iter().enumerate() {
        if *class == EdgeClass::Inessential && !imputation[e].is_zero() {
            return Ok(OwenMembership::No(OwenRejection::InessentialEdgePaid { edge: e }));
        }
    }

    let lengths: Vec<Rational> =
        (0..instance.agent_count()).map(|e| &imputation[e] / instance.capacities.get(e)).collect();

    let dag = build_min_cut_dag(instance)?;
    let nc = dag.cond.component_count();

    // Difference constraints over component potentials: an arc (a -> b, w)
    // encodes potential_b - potential_a <= w.
    let mut arcs: Vec<(usize, usize, Rational)> = Vec::new();
    for (e, t, h) in dag.cond.dag.edges() {
        match dag.edge_kinds[e] {
            DagEdgeKind::FullFlow { edge } => {
                // Saturated edges must be tight: potential rise equals length.
                arcs.push((t, h, lengths[edge].clone()));
                arcs.push((h, t, -lengths[edge].clone()));
            }
            DagEdgeKind::ZeroFlow { edge } => {
                // Original direction t -> h: length bounds the drop.
                arcs.push((h, t, lengths[edge].clone()));
            }
        }
    }
    // potential >= 0 with potential(sink') = 0: sink' - v <= 0.
    for v in 0..nc {
        if v != dag.sink_comp {
            arcs.push((v, dag.sink_comp, Rational::zero()));
        }
    }
    // source-sink drop of at least one: sink' - source' <= -1.
    arcs.push((dag.source_comp, dag.sink_comp, rat(-1)));

    let comp_potential = match solve_difference_constraints(nc, &arcs) {
        Some(mut dist) => {
            let shift = dist[dag.sink_comp].clone();
            for d in dist.iter_mut() {
                *d -= &shift;
            }
            dist
        }
        None => {
            return Ok(OwenMembership::No(OwenRejection::NoFeasiblePotentials(
                "tightness on saturated edges contradicts the length bounds".into(),
            )))
        }
    };

    let potentials: Vec<Rational> = (0..instance.graph.vertex_count())
        .map(|v| comp_potential[dag.cond.component_of[v]].clone())
        .collect();
    let dual = FlowDual { potentials, lengths };
    match dual.check_feasible(instance) {
        Ok(()) => {
            let objective = dual.objective(instance);
            if objective != worth {
                return Err(MaxFlowGameError::Internal(format!(
                    "membership dual pays {objective}, worth is {worth}"
                )));
            }
            Ok(OwenMembership::Yes(dual))
        }
        Err(reason) => Ok(OwenMembership::No(OwenRejection::NoFeasiblePotentials(reason))),
    }
}

fn validate_imputation(
    agents: usize,
    imputation: &[Rational],
    worth: &Rational,
) -> Result<(), MaxFlowGameError> {
    if imputation.len() != agents {
        return Err(MaxFlowGameError::NotAnImputation(format!(
            "expected {agents} shares, got {}",
            imputation.len()
        )));
    }
    if let Some(e) = imputation.iter().position(|p| p < &Rational::zero()) {
        return Err(MaxFlowGameError::NotAnImputation(format!("share of edge {e} is negative")));
    }
    let sum: Rational = imputation.iter().cloned().sum();
    if sum != *worth {
        return Err(MaxFlowGameError::NotAnImputation(format!(
            "shares sum to {sum}, worth is {worth}"
        )));
    }
    Ok(())
}

/// Bellman-Ford over difference constraints from a virtual all-zero source.
/// Returns `None` when a negative cycle makes the system infeasible.
fn solve_difference_constraints(
    n: usize,
    arcs: &[(usize, usize, Rational)],
) -> Option<Vec<Rational>> {
    let mut dist = vec![Rational::zero(); n];
    for round in 0..n {
        let mut changed = false;
        for (a, b, w) in arcs {
            let cand = &dist[*a] + w;
            if cand < dist[*b] {
                dist[*b] = cand;
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
        if round == n.saturating_sub(1) && changed {
            return None;
        }
    }
    Some(dist)
}

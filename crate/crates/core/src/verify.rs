//! Brute-force ground truth and seeded instance generators.
//!
//! Coalition worths are recomputed from scratch per subgame, through code
//! paths independent of the solvers under test where that is possible (the
//! b-matching subgame value uses an augmenting-path flow search rather than
//! the LP). Core verification enumerates all coalitions, so it is gated by
//! an agent bound.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::games::bmatching::BMatchingInstance;
use crate::games::branching::BranchingInstance;
use crate::games::maxflow::MaxFlowInstance;
use crate::graph::{max_flow, CapacityMap, DiGraph};
use crate::rational::{rat, Rational};

pub const DEFAULT_AGENT_BOUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("{agents} agents exceed the exhaustive-check bound of {bound}")]
    TooLarge { agents: usize, bound: usize },
    #[error("imputation has {got} shares, the game has {expected} agents")]
    WrongArity { expected: usize, got: usize },
    #[error("shares sum to {total}, the grand coalition is worth {worth}")]
    NotAnImputation { total: Rational, worth: Rational },
    #[error("solver failure during verification: {0}")]
    Solver(String),
}

/// Any of the three games.
#[derive(Debug, Clone)]
pub enum GameInstance {
    MaxFlow(MaxFlowInstance),
    Branching(BranchingInstance),
    BMatching(BMatchingInstance),
}

impl GameInstance {
    pub fn agent_count(&self) -> usize {
        match self {
            GameInstance::MaxFlow(i) => i.agent_count(),
            GameInstance::Branching(i) => i.agent_count(),
            GameInstance::BMatching(i) => i.agent_count(),
        }
    }

    pub fn is_cost_game(&self) -> bool {
        matches!(self, GameInstance::Branching(_))
    }

    pub fn worth(&self) -> Result<Rational, VerifyError> {
        coalition_value(self, &(0..self.agent_count()).collect::<Vec<_>>())
            .map(|w| w.expect("grand coalition is always defined"))
    }
}

/// Exact subgame value of a coalition, `None` when the coalition's worth is
/// undefined (a branching coalition that cannot reach the root) and its core
/// constraint therefore vacuous.
pub fn coalition_value(
    instance: &GameInstance,
    members: &[usize],
) -> Result<Option<Rational>, VerifyError> {
    match instance {
        GameInstance::MaxFlow(inst) => {
            if members.is_empty() {
                return Ok(Some(Rational::zero()));
            }
            // Subgraph induced by the member edges, same vertex set.
            let mut sub = DiGraph::new(inst.graph().vertex_count());
            let mut caps = Vec::new();
            for &e in members {
                sub.add_edge(inst.graph().tail(e), inst.graph().head(e))
                    .map_err(|e| VerifyError::Solver(e.to_string()))?;
                caps.push(inst.capacities().get(e).clone());
            }
            let caps = CapacityMap::new(&sub, caps).map_err(|e| VerifyError::Solver(e.to_string()))?;
            let flow = max_flow(&sub, &caps, inst.source(), inst.sink())
                .map_err(|e| VerifyError::Solver(e.to_string()))?;
            Ok(Some(flow.value))
        }
        GameInstance::Branching(inst) => {
            let agents = inst.agents();
            let vertices: Vec<usize> = members.iter().map(|&ai| agents[ai]).collect();
            Ok(inst.coalition_worth(&vertices))
        }
        GameInstance::BMatching(inst) => {
            let sub = inst.induced(members);
            Ok(Some(bmatching_value_combinatorial(&sub)?))
        }
    }
}

/// Max-weight b-matching value by augmenting-path search on a weighted flow
/// network — deliberately not the LP route, so the two can cross-check.
///
/// Successive longest augmenting paths (by net weight) from a virtual
/// source through U to V to a virtual sink; stops when the best path gain
/// is no longer positive. Capacities are integral, so each augmentation
/// moves at least one unit and termination is immediate.
fn bmatching_value_combinatorial(inst: &BMatchingInstance) -> Result<Rational, VerifyError> {
    let nu = inst.u_count();
    let nv = inst.v_count();
    let n = nu + nv + 2;
    let source = nu + nv;
    let sink = nu + nv + 1;

    struct Arc {
        to: usize,
        cap: BigInt,
        gain: Rational,
        rev: usize,
    }
    let mut adj: Vec<Vec<Arc>> = (0..n).map(|_| Vec::new()).collect();
    let add = |adj: &mut Vec<Vec<Arc>>, a: usize, b: usize, cap: i64, gain: Rational| {
        let ra = adj[a].len();
        let rb = adj[b].len();
        adj[a].push(Arc { to: b, cap: BigInt::from(cap), gain: gain.clone(), rev: rb });
        adj[b].push(Arc { to: a, cap: BigInt::zero(), gain: -gain, rev: ra });
    };
    for i in 0..nu {
        add(&mut adj, source, i, inst.cap(i) as i64, Rational::zero());
    }
    for j in 0..nv {
        add(&mut adj, nu + j, sink, inst.cap(nu + j) as i64, Rational::zero());
    }
    for (i, j, w) in inst.edges() {
        let cap = inst.cap(*i).min(inst.cap(nu + *j)) as i64;
        add(&mut adj, *i, nu + *j, cap, w.clone());
    }

    let mut total = Rational::zero();
    loop {
        // Bellman-Ford for the max-gain augmenting path (gains negate on
        // residual arcs; no positive cycles exist at an optimum prefix).
        let mut best: Vec<Option<Rational>> = vec![None; n];
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
        best[source] = Some(Rational::zero());
        for _ in 0..n {
            let mut changed = false;
            for a in 0..n {
                let Some(ba) = best[a].clone() else { continue };
                for (k, arc) in adj[a].iter().enumerate() {
                    if !arc.cap.is_positive() {
                        continue;
                    }
                    let cand = &ba + &arc.gain;
                    if best[arc.to].as_ref().map_or(true, |cur| cand > *cur) {
                        best[arc.to] = Some(cand);
                        pred[arc.to] = Some((a, k));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        match &best[sink] {
            Some(gain) if gain.is_positive() => {
                // Bottleneck along the path.
                let mut bottleneck: Option<BigInt> = None;
                let mut v = sink;
                while v != source {
                    let (a, k) = pred[v].expect("path exists");
                    let cap = adj[a][k].cap.clone();
                    if bottleneck.as_ref().map_or(true, |b| cap < *b) {
                        bottleneck = Some(cap);
                    }
                    v = a;
                }
                let theta = bottleneck.expect("nonempty path");
                let mut v = sink;
                while v != source {
                    let (a, k) = pred[v].expect("path exists");
                    adj[a][k].cap -= &theta;
                    let rev = adj[a][k].rev;
                    let to = adj[a][k].to;
                    adj[to][rev].cap += &theta;
                    v = a;
                }
                total += gain * Rational::from_integer(theta);
            }
            _ => break,
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreVerdict {
    Ok,
    Violation { coalition: Vec<usize>, coalition_value: Rational, coalition_share: Rational },
}

/// Exhaustive core check: every nonempty coalition, ascending bitmask order,
/// first violation reported. Profit games require share >= value, cost games
/// share <= value; undefined branching coalitions are skipped.
pub fn verify_core(
    instance: &GameInstance,
    imputation: &[Rational],
    agent_bound: usize,
) -> Result<CoreVerdict, VerifyError> {
    let agents = instance.agent_count();
    if agents > agent_bound {
        return Err(VerifyError::TooLarge { agents, bound: agent_bound });
    }
    if imputation.len() != agents {
        return Err(VerifyError::WrongArity { expected: agents, got: imputation.len() });
    }
    let worth = instance.worth()?;
    let total: Rational = imputation.iter().cloned().sum();
    if total != worth {
        return Err(VerifyError::NotAnImputation { total, worth });
    }
    let cost_game = instance.is_cost_game();
    for mask in 1u64..(1u64 << agents) {
        let members: Vec<usize> = (0..agents).filter(|&a| mask & (1 << a) != 0).collect();
        let Some(value) = coalition_value(instance, &members)? else {
            continue;
        };
        let share: Rational = members.iter().map(|&a| imputation[a].clone()).sum();
        let violated = if cost_game { share > value } else { share < value };
        if violated {
            return Ok(CoreVerdict::Violation {
                coalition: members,
                coalition_value: value,
                coalition_share: share,
            });
        }
    }
    Ok(CoreVerdict::Ok)
}

/// Reproducible random instances; identical parameters yield identical
/// instances.
#[derive(Debug, Clone)]
pub struct GeneratorParams {
    pub seed: u64,
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_value: i64,
}

impl GeneratorParams {
    pub fn new(seed: u64) -> Self {
        GeneratorParams { seed, max_vertices: 8, max_edges: 12, max_value: 5 }
    }
}

/// Random flow instance: a guaranteed source-sink path plus random extra
/// edges, integer capacities in `1..=max_value`.
pub fn random_maxflow(params: &GeneratorParams) -> MaxFlowInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = rng.gen_range(3..=params.max_vertices.max(3));
    let source = 0;
    let sink = n - 1;
    let mut graph = DiGraph::new(n);
    let mut caps = Vec::new();
    // Spine: a random path from source to sink through a shuffled subset.
    let mut interior: Vec<usize> = (1..n - 1).collect();
    for i in (1..interior.len()).rev() {
        let j = rng.gen_range(0..=i);
        interior.swap(i, j);
    }
    let hops = rng.gen_range(0..=interior.len());
    let mut prev = source;
    for &v in interior.iter().take(hops) {
        graph.add_edge(prev, v).expect("in range");
        caps.push(rat(rng.gen_range(1..=params.max_value)));
        prev = v;
    }
    graph.add_edge(prev, sink).expect("in range");
    caps.push(rat(rng.gen_range(1..=params.max_value)));
    while graph.edge_count() < params.max_edges.max(1) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        graph.add_edge(a, b).expect("in range");
        caps.push(rat(rng.gen_range(1..=params.max_value)));
    }
    let caps = CapacityMap::new(&graph, caps).expect("positive capacities");
    MaxFlowInstance::new(graph, caps, source, sink).expect("generator contract")
}

/// Random branching instance: a random in-tree toward the root plus extra
/// edges, integer costs in `0..=max_value`.
pub fn random_branching(params: &GeneratorParams) -> BranchingInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = rng.gen_range(2..=params.max_vertices.max(2));
    let root = 0;
    let mut graph = DiGraph::new(n);
    let mut costs = Vec::new();
    for v in 1..n {
        let target = rng.gen_range(0..v);
        graph.add_edge(v, target).expect("in range");
        costs.push(rat(rng.gen_range(0..=params.max_value)));
    }
    while graph.edge_count() < params.max_edges.max(n - 1) {
        let a = rng.gen_range(1..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        graph.add_edge(a, b).expect("in range");
        costs.push(rat(rng.gen_range(0..=params.max_value)));
    }
    BranchingInstance::new(graph, costs, root).expect("generator contract")
}

/// Random b-matching instance: capacities in `1..=3` capped so the total
/// stays within `max_vertices * 2`, weights in `1..=max_value`.
pub fn random_bmatching(params: &GeneratorParams) -> BMatchingInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let nu = rng.gen_range(1..=(params.max_vertices / 2).max(1));
    let nv = rng.gen_range(1..=(params.max_vertices / 2).max(1));
    let mut caps = Vec::new();
    for _ in 0..nu + nv {
        caps.push(rng.gen_range(1..=3u64));
    }
    let mut edges = Vec::new();
    let want = rng.gen_range(1..=params.max_edges.max(1));
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..want {
        let i = rng.gen_range(0..nu);
        let j = rng.gen_range(0..nv);
        if seen.insert((i, j)) {
            edges.push((i, j, rat(rng.gen_range(1..=params.max_value))));
        }
    }
    if edges.is_empty() {
        edges.push((0, 0, rat(1)));
    }
    BMatchingInstance::new(nu, nv, edges, caps).expect("generator contract")
}

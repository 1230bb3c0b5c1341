//! Exact maximum flow.
//!
//! Rational capacities are cleared to integers (scaling by the LCM of all
//! denominators), an integer blocking-flow algorithm with BFS level graphs
//! runs on big integers, and the result is rescaled. This terminates on every
//! input and keeps the flow exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{CapacityMap, DiGraph, GraphError};
use crate::rational::{denominator_lcm, Rational};

/// A feasible flow together with its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowResult {
    /// Flow per edge id, `0 <= f_e <= c_e`.
    pub flow: Vec<Rational>,
    /// Net out-flow of the source.
    pub value: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualOrigin {
    /// Residual edge in the direction of original edge `id` (`f < c`).
    Forward { id: usize },
    /// Residual edge against the direction of original edge `id` (`f > 0`).
    Reverse { id: usize },
}

impl ResidualOrigin {
    pub fn edge_id(&self) -> usize {
        match *self {
            ResidualOrigin::Forward { id } | ResidualOrigin::Reverse { id } => id,
        }
    }

    pub fn is_reverse(&self) -> bool {
        matches!(self, ResidualOrigin::Reverse { .. })
    }
}

/// Residual graph of a flow; zero-capacity residual edges are not materialized.
#[derive(Debug, Clone)]
pub struct ResidualGraph {
    pub graph: DiGraph,
    pub capacities: Vec<Rational>,
    /// Per residual edge: the original edge it came from and its direction.
    pub origin: Vec<ResidualOrigin>,
}

struct DinicEdge {
    to: usize,
    cap: BigInt,
    rev: usize,
}

struct Dinic {
    adj: Vec<Vec<DinicEdge>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic { adj: (0..n).map(|_| Vec::new()).collect(), level: vec![-1; n], iter: vec![0; n] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: BigInt) -> (usize, usize) {
        let fwd = self.adj[from].len();
        let bwd = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(DinicEdge { to, cap, rev: bwd });
        self.adj[to].push(DinicEdge { to: from, cap: BigInt::zero(), rev: fwd });
        (from, fwd)
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for e in &self.adj[v] {
                if e.cap.is_positive() && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, limit: BigInt) -> BigInt {
        if v == t {
            return limit;
        }
        while self.iter[v] < self.adj[v].len() {
            let i = self.iter[v];
            let (to, cap) = {
                let e = &self.adj[v][i];
                (e.to, e.cap.clone())
            };
            if cap.is_positive() && self.level[v] < self.level[to] {
                let pushed = self.dfs(to, t, limit.clone().min(cap));
                if pushed.is_positive() {
                    let rev = self.adj[v][i].rev;
                    self.adj[v][i].cap -= &pushed;
                    self.adj[to][rev].cap += &pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        BigInt::zero()
    }

    fn run(&mut self, s: usize, t: usize, infinite: BigInt) {
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let pushed = self.dfs(s, t, infinite.clone());
                if pushed.is_zero() {
                    break;
                }
            }
        }
    }
}

/// Computes an exact maximum `s`-`t` flow.
pub fn max_flow(
    graph: &DiGraph,
    capacities: &CapacityMap,
    s: usize,
    t: usize,
) -> Result<FlowResult, GraphError> {
    for v in [s, t] {
        if v >= graph.vertex_count() {
            return Err(GraphError::InvalidVertex(v, graph.vertex_count()));
        }
    }
    if s == t {
        return Err(GraphError::SourceIsSink);
    }

    let scale = denominator_lcm(capacities.values().iter());
    let scale_rat = Rational::from_integer(scale.clone());
    let int_caps: Vec<BigInt> =
        capacities.values().iter().map(|c| (c * &scale_rat).to_integer()).collect();

    let mut total = BigInt::one();
    for c in &int_caps {
        total += c;
    }

    let mut dinic = Dinic::new(graph.vertex_count());
    let mut slots = Vec::with_capacity(graph.edge_count());
    for (id, tail, head) in graph.edges() {
        slots.push(dinic.add_edge(tail, head, int_caps[id].clone()));
    }
    dinic.run(s, t, total);

    let mut flow = Vec::with_capacity(graph.edge_count());
    let mut value = Rational::zero();
    for (id, (v, i)) in slots.into_iter().enumerate() {
        let sent = &int_caps[id] - &dinic.adj[v][i].cap;
        let f = Rational::new(sent, scale.clone());
        if graph.tail(id) == s {
            value += &f;
        }
        if graph.head(id) == s {
            value -= &f;
        }
        flow.push(f);
    }
    Ok(FlowResult { flow, value })
}

/// Builds the residual graph of `flow`: a forward copy of every unsaturated
/// edge and a reverse copy of every edge carrying flow.
pub fn residual_graph(graph: &DiGraph, capacities: &CapacityMap, flow: &FlowResult) -> ResidualGraph {
    let mut res = DiGraph::new(graph.vertex_count());
    let mut caps = Vec::new();
    let mut origin = Vec::new();
    for (id, tail, head) in graph.edges() {
        let c = capacities.get(id);
        let f = &flow.flow[id];
        if f < c {
            res.add_edge(tail, head).expect("endpoints validated by source graph");
            caps.push(c - f);
            origin.push(ResidualOrigin::Forward { id });
        }
        if f > &Rational::zero() {
            res.add_edge(head, tail).expect("endpoints validated by source graph");
            caps.push(f.clone());
            origin.push(ResidualOrigin::Reverse { id });
        }
    }
    ResidualGraph { graph: res, capacities: caps, origin }
}

/// Source side of a minimum cut: the vertices reachable from `s` in the
/// residual graph of a maximum flow.
pub fn min_vertex_cut_side(
    graph: &DiGraph,
    capacities: &CapacityMap,
    flow: &FlowResult,
    s: usize,
) -> Vec<usize> {
    let res = residual_graph(graph, capacities, flow);
    let adj = res.graph.out_edges();
    let mut seen = vec![false; graph.vertex_count()];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(v) = stack.pop() {
        for &e in &adj[v] {
            let h = res.graph.head(e);
            if !seen[h] {
                seen[h] = true;
                stack.push(h);
            }
        }
    }
    (0..graph.vertex_count()).filter(|&v| seen[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn caps(graph: &DiGraph, v: Vec<Rational>) -> CapacityMap {
        CapacityMap::new(graph, v).unwrap()
    }

    #[test]
    fn bottleneck_path() {
        // s -> a (2), a -> t (1): value is the bottleneck.
        let g = DiGraph::with_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let c = caps(&g, vec![rat(2), rat(1)]);
        let f = max_flow(&g, &c, 0, 2).unwrap();
        assert_eq!(f.value, rat(1));
        assert_eq!(f.flow, vec![rat(1), rat(1)]);
    }

    #[test]
    fn unit_diamond() {
        let g = DiGraph::with_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let c = caps(&g, vec![rat(1); 4]);
        let f = max_flow(&g, &c, 0, 3).unwrap();
        assert_eq!(f.value, rat(2));
    }

    #[test]
    fn wide_in_narrow_middle() {
        // Caps 10 on (s,v1),(v2,t),(v3,t); 1 on (v1,v2),(v1,v3): worth 2.
        let g = DiGraph::with_edges(5, &[(0, 1), (1, 2), (1, 3), (2, 4), (3, 4)]).unwrap();
        let c = caps(&g, vec![rat(10), rat(1), rat(1), rat(10), rat(10)]);
        let f = max_flow(&g, &c, 0, 4).unwrap();
        assert_eq!(f.value, rat(2));
    }

    #[test]
    fn fractional_capacities_stay_exact() {
        let g = DiGraph::with_edges(3, &[(0, 1), (1, 2), (0, 1)]).unwrap();
        let c = caps(&g, vec![ratio(1, 3), ratio(5, 6), ratio(1, 4)]);
        let f = max_flow(&g, &c, 0, 2).unwrap();
        // min(1/3 + 1/4, 5/6) = 7/12 exactly.
        assert_eq!(f.value, ratio(7, 12));
    }

    #[test]
    fn invalid_endpoints_rejected() {
        let g = DiGraph::with_edges(2, &[(0, 1)]).unwrap();
        let c = caps(&g, vec![rat(1)]);
        assert_eq!(max_flow(&g, &c, 0, 5).unwrap_err(), GraphError::InvalidVertex(5, 2));
        assert_eq!(max_flow(&g, &c, 1, 1).unwrap_err(), GraphError::SourceIsSink);
    }

    #[test]
    fn residual_of_saturated_unit_path() {
        let g = DiGraph::with_edges(2, &[(0, 1)]).unwrap();
        let c = caps(&g, vec![rat(1)]);
        let f = max_flow(&g, &c, 0, 1).unwrap();
        let r = residual_graph(&g, &c, &f);
        assert_eq!(r.graph.edge_count(), 1);
        assert_eq!((r.graph.tail(0), r.graph.head(0)), (1, 0));
        assert_eq!(r.origin[0], ResidualOrigin::Reverse { id: 0 });
    }

    #[test]
    fn residual_directions() {
        let g = DiGraph::with_edges(2, &[(0, 1)]).unwrap();
        let c = caps(&g, vec![rat(2)]);
        // Zero flow: forward edge only.
        let zero = FlowResult { flow: vec![rat(0)], value: rat(0) };
        let r = residual_graph(&g, &c, &zero);
        assert_eq!(r.origin, vec![ResidualOrigin::Forward { id: 0 }]);
        // Partial flow: both directions.
        let part = FlowResult { flow: vec![rat(1)], value: rat(1) };
        let r = residual_graph(&g, &c, &part);
        assert_eq!(
            r.origin,
            vec![ResidualOrigin::Forward { id: 0 }, ResidualOrigin::Reverse { id: 0 }]
        );
    }

    #[test]
    fn cut_side_examples() {
        let g = DiGraph::with_edges(2, &[(0, 1)]).unwrap();
        let c = caps(&g, vec![rat(1)]);
        let f = max_flow(&g, &c, 0, 1).unwrap();
        assert_eq!(min_vertex_cut_side(&g, &c, &f, 0), vec![0]);

        let g = DiGraph::with_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let c = caps(&g, vec![rat(1), rat(2)]);
        let f = max_flow(&g, &c, 0, 2).unwrap();
        assert_eq!(min_vertex_cut_side(&g, &c, &f, 0), vec![0]);

        let g = DiGraph::with_edges(2, &[(0, 1)]).unwrap();
        let c = caps(&g, vec![rat(0)]);
        let f = max_flow(&g, &c, 0, 1).unwrap();
        assert_eq!(f.value, rat(0));
        assert_eq!(min_vertex_cut_side(&g, &c, &f, 0), vec![0]);
    }
}

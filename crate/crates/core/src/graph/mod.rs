//! Directed multigraph kernel: exact max-flow, residual graphs, strongly
//! connected component condensation and DAG longest paths.
//!
//! Edges are first-class and addressed by dense ids `0..m`; parallel edges
//! are permitted everywhere (the min-cut condensation is explicitly a
//! multigraph).

mod classify;
mod longest_path;
mod maxflow;
mod scc;

pub use classify::{classify_edges, EdgeClass, EdgeClassification};
pub use longest_path::{longest_path_condensation, longest_path_dag, LongestPaths};
pub use maxflow::{max_flow, min_vertex_cut_side, residual_graph, FlowResult, ResidualGraph, ResidualOrigin};
pub use scc::{condense_scc, CondensationDag};

use crate::rational::Rational;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    InvalidVertex(usize, usize),
    #[error("source and sink must differ")]
    SourceIsSink,
    #[error("capacity of edge {0} is negative")]
    NegativeCapacity(usize),
    #[error("capacity map covers {0} edges, graph has {1}")]
    CapacityLenMismatch(usize, usize),
    #[error("graph is not acyclic")]
    CycleDetected,
}

/// A directed multigraph with dense vertex ids `0..n` and edge ids `0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl DiGraph {
    pub fn new(vertex_count: usize) -> Self {
        DiGraph { vertex_count, edges: Vec::new() }
    }

    pub fn with_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = DiGraph::new(vertex_count);
        for &(tail, head) in edges {
            g.add_edge(tail, head)?;
        }
        Ok(g)
    }

    /// Adds an edge and returns its id.
    pub fn add_edge(&mut self, tail: usize, head: usize) -> Result<usize, GraphError> {
        for v in [tail, head] {
            if v >= self.vertex_count {
                return Err(GraphError::InvalidVertex(v, self.vertex_count));
            }
        }
        self.edges.push((tail, head));
        Ok(self.edges.len() - 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn tail(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn head(&self, e: usize) -> usize {
        self.edges[e].1
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges.iter().enumerate().map(|(id, &(t, h))| (id, t, h))
    }

    /// Out-edge ids per vertex.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (id, &(t, _)) in self.edges.iter().enumerate() {
            adj[t].push(id);
        }
        adj
    }

    /// Topological order of the vertices, or `CycleDetected`.
    pub fn topological_order(&self) -> Result<Vec<usize>, GraphError> {
        let mut indeg = vec![0usize; self.vertex_count];
        for &(_, h) in &self.edges {
            indeg[h] += 1;
        }
        let adj = self.out_edges();
        let mut queue: Vec<usize> = (0..self.vertex_count).filter(|&v| indeg[v] == 0).collect();
        queue.sort_unstable();
        let mut order = Vec::with_capacity(self.vertex_count);
        let mut i = 0;
        while i < queue.len() {
            let v = queue[i];
            i += 1;
            order.push(v);
            for &e in &adj[v] {
                let h = self.head(e);
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    queue.push(h);
                }
            }
        }
        if order.len() == self.vertex_count {
            Ok(order)
        } else {
            Err(GraphError::CycleDetected)
        }
    }
}

/// Nonnegative rational capacity per edge id; must cover every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityMap(Vec<Rational>);

impl CapacityMap {
    pub fn new(graph: &DiGraph, capacities: Vec<Rational>) -> Result<Self, GraphError> {
        if capacities.len() != graph.edge_count() {
            return Err(GraphError::CapacityLenMismatch(capacities.len(), graph.edge_count()));
        }
        if let Some(e) = capacities.iter().position(|c| c < &Rational::zero()) {
            return Err(GraphError::NegativeCapacity(e));
        }
        Ok(CapacityMap(capacities))
    }

    pub fn get(&self, e: usize) -> &Rational {
        &self.0[e]
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }
}

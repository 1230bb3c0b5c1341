//! Strongly connected component condensation.

use super::{DiGraph, GraphError};

/// Condensation of a directed multigraph: one vertex per strongly connected
/// component, self-loops dropped, parallel cross-component edges preserved
/// with provenance back to the source graph.
///
/// Component ids are topologically ordered: every DAG edge goes from a lower
/// id to a higher id.
#[derive(Debug, Clone)]
pub struct CondensationDag {
    /// The acyclic quotient multigraph over component ids.
    pub dag: DiGraph,
    /// Component id -> vertices of the source graph it contains (sorted).
    pub members: Vec<Vec<usize>>,
    /// Source vertex -> component id.
    pub component_of: Vec<usize>,
    /// DAG edge id -> originating edge id in the source graph.
    pub edge_source: Vec<usize>,
}

/// Shrinks each maximal strongly connected component to a single vertex.
pub fn condense_scc(graph: &DiGraph) -> CondensationDag {
    let comp_rev = tarjan(graph);
    let comp_count = comp_rev.iter().copied().max().map_or(0, |m| m + 1);
    // Tarjan completes sink components first; flip so ids are topological.
    let component_of: Vec<usize> =
        comp_rev.iter().map(|&c| comp_count - 1 - c).collect();

    let mut members = vec![Vec::new(); comp_count];
    for v in 0..graph.vertex_count() {
        members[component_of[v]].push(v);
    }

    let mut dag = DiGraph::new(comp_count);
    let mut edge_source = Vec::new();
    for (id, tail, head) in graph.edges() {
        let (ct, ch) = (component_of[tail], component_of[head]);
        if ct != ch {
            dag.add_edge(ct, ch).expect("component ids in range");
            edge_source.push(id);
        }
    }
    debug_assert!(dag.topological_order().is_ok());
    CondensationDag { dag, members, component_of, edge_source }
}

impl CondensationDag {
    pub fn component_count(&self) -> usize {
        self.dag.vertex_count()
    }

    /// Checks that the components partition the source vertex set and that
    /// the quotient graph is acyclic.
    pub fn validate(&self, source: &DiGraph) -> Result<(), GraphError> {
        let mut seen = vec![false; source.vertex_count()];
        for (c, group) in self.members.iter().enumerate() {
            for &v in group {
                if v >= seen.len() || seen[v] || self.component_of[v] != c {
                    return Err(GraphError::InvalidVertex(v, seen.len()));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(GraphError::CycleDetected);
        }
        self.dag.topological_order().map(|_| ())
    }
}

/// Iterative Tarjan; returns the component index per vertex in completion
/// order (sinks first).
fn tarjan(graph: &DiGraph) -> Vec<usize> {
    let n = graph.vertex_count();
    let adj = graph.out_edges();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0usize;
    let mut comp_count = 0usize;

    // Explicit DFS frames: (vertex, next out-edge position).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(top) = frames.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let e = adj[v][top.1];
                top.1 += 1;
                let w = graph.head(e);
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }
    comp
}

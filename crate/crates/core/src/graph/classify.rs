//! Essential / inessential edge classification.
//!
//! An edge is essential when it is saturated in every maximum flow. With one
//! fixed max-flow `f` this is decidable locally: `e` is essential iff
//! `f_e = c_e` and the reverse residual edge lies on no residual cycle,
//! i.e. the endpoints of `e` fall in distinct strongly connected components
//! of the residual graph.

use super::{condense_scc, max_flow, residual_graph, CapacityMap, DiGraph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    Essential,
    Inessential,
}

/// Classification covering every edge id.
pub type EdgeClassification = Vec<EdgeClass>;

pub fn classify_edges(
    graph: &DiGraph,
    capacities: &CapacityMap,
    s: usize,
    t: usize,
) -> Result<EdgeClassification, GraphError> {
    let flow = max_flow(graph, capacities, s, t)?;
    let residual = residual_graph(graph, capacities, &flow);
    let cond = condense_scc(&residual.graph);
    Ok(graph
        .edges()
        .map(|(id, tail, head)| {
            let saturated = flow.flow[id] == *capacities.get(id);
            if saturated && cond.component_of[tail] != cond.component_of[head] {
                EdgeClass::Essential
            } else {
                EdgeClass::Inessential
            }
        })
        .collect())
}

//! Single-source longest paths on a DAG with nonnegative rational lengths.

use super::{CondensationDag, DiGraph, GraphError};
use crate::rational::Rational;

/// Distances and predecessors of one longest-path computation.
///
/// `distance[v]` is `None` when `v` is unreachable from the source (an
/// explicit absent sentinel rather than a fake extreme value).
/// `predecessor[v]` holds `(previous vertex, edge id)` on one maximizing
/// path; ties prefer the smallest predecessor vertex id, then the smallest
/// edge id, so results are reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongestPaths {
    pub distance: Vec<Option<Rational>>,
    pub predecessor: Vec<Option<(usize, usize)>>,
}

impl LongestPaths {
    /// Reconstructs the vertex sequence of a maximizing path to `target`.
    pub fn path_to(&self, source: usize, target: usize) -> Option<Vec<usize>> {
        self.distance[target].as_ref()?;
        let mut path = vec![target];
        let mut v = target;
        while v != source {
            let (prev, _) = self.predecessor[v]?;
            path.push(prev);
            v = prev;
        }
        path.reverse();
        Some(path)
    }
}

/// Longest paths from `source` in a DAG under nonnegative edge lengths.
///
/// `lengths(edge_id)` is evaluated per DAG edge. Fails with `CycleDetected`
/// if the graph is not acyclic.
pub fn longest_path_dag(
    dag: &DiGraph,
    lengths: impl Fn(usize) -> Rational,
    source: usize,
) -> Result<LongestPaths, GraphError> {
    if source >= dag.vertex_count() {
        return Err(GraphError::InvalidVertex(source, dag.vertex_count()));
    }
    let order = dag.topological_order()?;
    let adj = dag.out_edges();
    let mut distance: Vec<Option<Rational>> = vec![None; dag.vertex_count()];
    let mut predecessor: Vec<Option<(usize, usize)>> = vec![None; dag.vertex_count()];
    distance[source] = Some(Rational::from_integer(0.into()));

    for &v in &order {
        let Some(dv) = distance[v].clone() else { continue };
        for &e in &adj[v] {
            let w = dag.head(e);
            let cand = &dv + lengths(e);
            let better = match &distance[w] {
                None => true,
                Some(cur) => {
                    cand > *cur
                        || (cand == *cur
                            && match predecessor[w] {
                                Some((pv, pe)) => (v, e) < (pv, pe),
                                None => true,
                            })
                }
            };
            if better {
                distance[w] = Some(cand);
                predecessor[w] = Some((v, e));
            }
        }
    }
    Ok(LongestPaths { distance, predecessor })
}

/// Convenience wrapper for condensations: lengths indexed by DAG edge id.
pub fn longest_path_condensation(
    cond: &CondensationDag,
    lengths: &[Rational],
    source: usize,
) -> Result<LongestPaths, GraphError> {
    longest_path_dag(&cond.dag, |e| lengths[e].clone(), source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn chain_sums_lengths() {
        let g = DiGraph::with_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let lens = [ratio(1, 2), ratio(1, 3)];
        let lp = longest_path_dag(&g, |e| lens[e].clone(), 0).unwrap();
        assert_eq!(lp.distance[2], Some(ratio(5, 6)));
        assert_eq!(lp.path_to(0, 2), Some(vec![0, 1, 2]));
    }

    #[test]
    fn unreachable_is_absent() {
        let g = DiGraph::with_edges(3, &[(0, 1)]).unwrap();
        let lp = longest_path_dag(&g, |_| rat(1), 0).unwrap();
        assert_eq!(lp.distance[2], None);
        assert_eq!(lp.path_to(0, 2), None);
    }

    #[test]
    fn diamond_tie_prefers_lowest_predecessor() {
        // 0 -> 1 -> 3 with lengths 1, 0 and 0 -> 2 -> 3 with lengths 0, 1.
        let g = DiGraph::with_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let lens = [rat(1), rat(0), rat(0), rat(1)];
        let lp = longest_path_dag(&g, |e| lens[e].clone(), 0).unwrap();
        assert_eq!(lp.distance[3], Some(rat(1)));
        assert_eq!(lp.predecessor[3], Some((1, 2)));
        assert_eq!(lp.path_to(0, 3), Some(vec![0, 1, 3]));
    }

    #[test]
    fn cyclic_input_rejected() {
        let g = DiGraph::with_edges(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(longest_path_dag(&g, |_| rat(1), 0).unwrap_err(), GraphError::CycleDetected);
    }
}

//! Property tests for the graph kernel: exact max-flow/min-cut equality,
//! flow feasibility, condensation acyclicity, and the behavioral meaning of
//! the essential/inessential split.

use num_traits::Zero;
use proptest::prelude::*;

use owenset::graph::{
    classify_edges, condense_scc, max_flow, min_vertex_cut_side, CapacityMap, DiGraph, EdgeClass,
};
use owenset::rational::{rat, ratio, Rational};

/// A random multigraph with positive rational capacities.
fn arb_instance() -> impl Strategy<Value = (DiGraph, CapacityMap, usize, usize)> {
    (2usize..7, 1usize..12).prop_flat_map(|(n, m)| {
        let edges = proptest::collection::vec((0..n, 0..n, 1i64..6, 1i64..4), m);
        edges.prop_map(move |spec| {
            let mut graph = DiGraph::new(n);
            let mut caps = Vec::new();
            for (a, b, p, q) in spec {
                graph.add_edge(a, b).unwrap();
                caps.push(ratio(p, q));
            }
            let caps = CapacityMap::new(&graph, caps).unwrap();
            (graph, caps, 0, n - 1)
        })
    })
}

fn cut_capacity(graph: &DiGraph, caps: &CapacityMap, side: &[usize]) -> Rational {
    let inside: Vec<bool> = {
        let mut v = vec![false; graph.vertex_count()];
        for &x in side {
            v[x] = true;
        }
        v
    };
    graph
        .edges()
        .filter(|&(_, t, h)| inside[t] && !inside[h])
        .map(|(e, _, _)| caps.get(e).clone())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn max_flow_equals_min_cut((graph, caps, s, t) in arb_instance()) {
        let flow = max_flow(&graph, &caps, s, t).unwrap();

        // Feasibility: capacity bounds and conservation, all exact.
        for (e, _, _) in graph.edges() {
            prop_assert!(flow.flow[e] >= Rational::zero());
            prop_assert!(flow.flow[e] <= *caps.get(e));
        }
        for v in 0..graph.vertex_count() {
            if v == s || v == t {
                continue;
            }
            let net: Rational = graph
                .edges()
                .map(|(e, tail, head)| {
                    let mut x = Rational::zero();
                    if head == v {
                        x += &flow.flow[e];
                    }
                    if tail == v {
                        x -= &flow.flow[e];
                    }
                    x
                })
                .sum();
            prop_assert_eq!(net, Rational::zero());
        }

        // Strong duality with the residual-reachable cut.
        let side = min_vertex_cut_side(&graph, &caps, &flow, s);
        prop_assert!(side.contains(&s));
        prop_assert!(!side.contains(&t));
        prop_assert_eq!(cut_capacity(&graph, &caps, &side), flow.value);
    }

    #[test]
    fn condensation_is_acyclic((graph, caps, s, t) in arb_instance()) {
        let cond = condense_scc(&graph);
        cond.validate(&graph).unwrap();

        // Residual graphs condense cleanly too.
        let flow = max_flow(&graph, &caps, s, t).unwrap();
        let res = owenset::graph::residual_graph(&graph, &caps, &flow);
        let cond = condense_scc(&res.graph);
        cond.validate(&res.graph).unwrap();
    }

    // "Saturated in every max-flow" checked against an independent LP
    // oracle (the minimum flow an edge can carry across all max-flows),
    // plus the perturbation consequence at a per-edge safe epsilon: an
    // inessential edge tolerates any squeeze below its worst-case slack,
    // an essential one loses worth under every positive squeeze.
    #[test]
    fn essential_edges_have_negotiating_power((graph, caps, s, t) in arb_instance()) {
        let classes = classify_edges(&graph, &caps, s, t).unwrap();
        let base = max_flow(&graph, &caps, s, t).unwrap().value;

        for e in 0..graph.edge_count() {
            let floor = min_flow_over_max_flows(&graph, &caps, s, t, e);
            let essential = floor == *caps.get(e) && !caps.get(e).is_zero();
            prop_assert_eq!(
                classes[e] == EdgeClass::Essential,
                essential,
                "edge {} classification disagrees with the LP oracle", e
            );

            let eps = match classes[e] {
                EdgeClass::Essential => caps.get(e) / rat(2),
                EdgeClass::Inessential => (caps.get(e) - &floor) / rat(2),
            };
            if eps.is_zero() {
                continue; // zero-capacity or zero-slack inessential edge
            }
            let mut perturbed: Vec<Rational> =
                (0..graph.edge_count()).map(|i| caps.get(i).clone()).collect();
            perturbed[e] -= &eps;
            let perturbed = CapacityMap::new(&graph, perturbed).unwrap();
            let value = max_flow(&graph, &perturbed, s, t).unwrap().value;
            match classes[e] {
                EdgeClass::Essential => prop_assert!(
                    value < base,
                    "essential edge {} must lower the worth when squeezed", e
                ),
                EdgeClass::Inessential => prop_assert_eq!(
                    &value, &base,
                    "inessential edge {} must not affect the worth", e
                ),
            }
        }
    }
}

/// LP oracle: the least flow edge `target` carries over all maximum flows.
fn min_flow_over_max_flows(
    graph: &DiGraph,
    caps: &CapacityMap,
    s: usize,
    t: usize,
    target: usize,
) -> Rational {
    use owenset::lp::{LinearProgram, LpStatus, Relation, Sense, VarKind};
    let value = max_flow(graph, caps, s, t).unwrap().value;
    let mut lp = LinearProgram::new(Sense::Minimize);
    for e in 0..graph.edge_count() {
        lp.add_var(format!("f{e}"), VarKind::NonNeg);
    }
    for e in 0..graph.edge_count() {
        lp.add_constraint(vec![(e, rat(1))], Relation::Le, caps.get(e).clone()).unwrap();
    }
    for v in 0..graph.vertex_count() {
        if v == s || v == t {
            continue;
        }
        let coeffs: Vec<(Rational, usize)> = graph
            .edges()
            .filter_map(|(e, tail, head)| {
                if head == v && tail == v {
                    None
                } else if head == v {
                    Some((rat(1), e))
                } else if tail == v {
                    Some((rat(-1), e))
                } else {
                    None
                }
            })
            .collect();
        lp.add_constraint(
            coeffs.into_iter().map(|(c, e)| (e, c)).collect(),
            Relation::Eq,
            Rational::zero(),
        )
        .unwrap();
    }
    let net_source: Vec<(usize, Rational)> = graph
        .edges()
        .filter_map(|(e, tail, head)| {
            if tail == s && head == s {
                None
            } else if tail == s {
                Some((e, rat(1)))
            } else if head == s {
                Some((e, rat(-1)))
            } else {
                None
            }
        })
        .collect();
    lp.add_constraint(net_source, Relation::Eq, value).unwrap();
    lp.set_objective(vec![(target, rat(1))]).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    sol.objective.unwrap()
}

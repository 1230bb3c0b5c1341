//! Structural properties of the matching game's optimal dual face, probed
//! with auxiliary LPs over the face: per-coordinate ranges detect
//! flexibility, per-edge maximum slack detects edges that are tight in
//! every optimal dual.

use owenset::games::bmatching::{
    self, dual_lp, leximax_owen, leximin_owen, max_weight_bmatching, BMatchingInstance,
};
use owenset::lp::{LinearProgram, LpStatus, Relation, Sense};
use owenset::rational::{rat, Rational};
use owenset::verify::{random_bmatching, GeneratorParams};

/// The dual LP with its objective pinned to the optimum, i.e. the optimal
/// face as a feasible region.
fn pinned_face(inst: &BMatchingInstance) -> LinearProgram {
    let (_, worth, _) = max_weight_bmatching(inst).unwrap();
    let mut lp = dual_lp(inst);
    let obj: Vec<(usize, Rational)> =
        (0..inst.agent_count()).map(|a| (a, rat(inst.cap(a) as i64))).collect();
    lp.add_constraint(obj, Relation::Eq, worth).unwrap();
    lp
}

fn optimize_over_face(
    face: &LinearProgram,
    coeffs: Vec<(usize, Rational)>,
    sense: Sense,
) -> Rational {
    let mut lp = LinearProgram::new(sense);
    for j in 0..face.var_count() {
        lp.add_var(face.var_name(j).to_string(), face.var_kind(j));
    }
    for i in 0..face.constraint_count() {
        let c = face.constraint(i);
        lp.add_constraint(c.coeffs.clone(), c.relation, c.rhs.clone()).unwrap();
    }
    lp.set_objective(coeffs).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    sol.objective.unwrap()
}

/// Per-agent dual range over the optimal face.
fn dual_ranges(inst: &BMatchingInstance) -> Vec<(Rational, Rational)> {
    let face = pinned_face(inst);
    (0..inst.agent_count())
        .map(|a| {
            let lo = optimize_over_face(&face, vec![(a, rat(1))], Sense::Minimize);
            let hi = optimize_over_face(&face, vec![(a, rat(1))], Sense::Maximize);
            (lo, hi)
        })
        .collect()
}

#[test]
fn unique_dual_forces_leximin_equals_leximax() {
    let mut uniques = 0;
    for seed in 0..30 {
        let inst = random_bmatching(&GeneratorParams::new(seed));
        let ranges = dual_ranges(&inst);
        let unique = ranges.iter().all(|(lo, hi)| lo == hi);
        if unique {
            uniques += 1;
            assert_eq!(
                leximin_owen(&inst).unwrap(),
                leximax_owen(&inst).unwrap(),
                "seed {seed}: unique dual must collapse the orders"
            );
        }
    }
    assert!(uniques > 0, "the sweep should hit at least one unique-dual instance");
}

#[test]
fn flexible_tight_components_are_balanced() {
    let mut flexible_seen = 0;
    for seed in 0..30 {
        let inst = random_bmatching(&GeneratorParams::new(seed));
        let face = pinned_face(&inst);
        let ranges = dual_ranges(&inst);

        // Edges tight in every optimal dual: maximum slack over the face is 0.
        let mut always_tight = Vec::new();
        for (idx, (i, j, w)) in inst.edges().iter().enumerate() {
            let v_agent = inst.u_count() + j;
            let max_slack = optimize_over_face(
                &face,
                vec![(*i, rat(1)), (v_agent, rat(1))],
                Sense::Maximize,
            ) - w;
            if max_slack == rat(0) {
                always_tight.push(idx);
            }
        }

        // Union-find over the always-tight subgraph.
        let mut parent: Vec<usize> = (0..inst.agent_count()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for &idx in &always_tight {
            let (i, j, _) = &inst.edges()[idx];
            let a = find(&mut parent, *i);
            let b = find(&mut parent, inst.u_count() + j);
            parent[a] = b;
        }

        // A component with any flexible member admits two distinct optimal
        // duals; its U-side and V-side capacity sums must match, otherwise
        // rotating the duals would change the paid total.
        let mut by_root: std::collections::BTreeMap<usize, (i64, i64, bool)> = Default::default();
        for a in 0..inst.agent_count() {
            let root = find(&mut parent, a);
            let entry = by_root.entry(root).or_insert((0, 0, false));
            if a < inst.u_count() {
                entry.0 += inst.cap(a) as i64;
            } else {
                entry.1 += inst.cap(a) as i64;
            }
            if ranges[a].0 != ranges[a].1 {
                entry.2 = true;
            }
        }
        for (root, (bu, bv, flexible)) in by_root {
            if flexible {
                flexible_seen += 1;
                assert_eq!(
                    bu, bv,
                    "seed {seed}: flexible tight component at {root} must balance capacities"
                );
            }
        }
    }
    assert!(flexible_seen > 0, "the sweep should hit at least one flexible component");
}

#[test]
fn leximin_equals_aggregate_over_unique_coordinates() {
    // Where a coordinate is pinned (lo == hi), every Owen imputation pays
    // b * that value; the leximin must agree there.
    for seed in 0..15 {
        let inst = random_bmatching(&GeneratorParams::new(seed));
        let ranges = dual_ranges(&inst);
        let lex = bmatching::leximin_owen(&inst).unwrap();
        for a in 0..inst.agent_count() {
            let (lo, hi) = &ranges[a];
            if lo == hi {
                assert_eq!(lex[a], lo * rat(inst.cap(a) as i64), "seed {seed} agent {a}");
            }
        }
    }
}

//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured facts. Everything asserts exact rational
//! equality; the only tolerances anywhere are the wall-clock budgets of
//! criterion 10.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};



use owenset::games::{bmatching, branching, maxflow};
use owenset::leximin::{verify_leximin, VerifyOutcome};
use owenset::lp::{LinearProgram, LpStatus, Relation, Sense, VarKind};
use owenset::rational::{rat, ratio, Rational};
use owenset::verify::{
    random_bmatching, random_branching, random_maxflow, verify_core, CoreVerdict, GameInstance,
    GeneratorParams,
};
use owenset_cli::instance::InstanceFile;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn load(name: &str) -> (InstanceFile, GameInstance, Vec<String>) {
    let text = std::fs::read_to_string(fixtures().join(name)).unwrap();
    let file = InstanceFile::parse(&text).unwrap();
    let (game, names) = file.lower().unwrap();
    (file, game, names)
}

fn unit_flow_path(n: usize) -> maxflow::MaxFlowInstance {
    use owenset::graph::{CapacityMap, DiGraph};
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, i + 1)).collect();
    let graph = DiGraph::with_edges(n + 1, &edges).unwrap();
    let caps = CapacityMap::new(&graph, vec![rat(1); n]).unwrap();
    maxflow::MaxFlowInstance::new(graph, caps, 0, n).unwrap()
}

fn unit_cost_chain(agents: usize) -> branching::BranchingInstance {
    use owenset::graph::DiGraph;
    let edges: Vec<(usize, usize)> = (1..=agents).map(|v| (v, v - 1)).collect();
    let graph = DiGraph::with_edges(agents + 1, &edges).unwrap();
    branching::BranchingInstance::new(graph, vec![rat(1); agents], 0).unwrap()
}

#[test]
fn criterion_01_flow_core_point_outside_owen_set() {
    let started = Instant::now();
    let (_, game, _) = load("fig-flow.game");
    let GameInstance::MaxFlow(inst) = &game else { panic!("fixture kind") };
    assert_eq!(inst.worth().unwrap(), rat(2));

    let shares = vec![rat(2), rat(0), rat(0), rat(0), rat(0)];
    assert_eq!(verify_core(&game, &shares, 16).unwrap(), CoreVerdict::Ok);
    match maxflow::check_owen_membership(inst, &shares).unwrap() {
        maxflow::OwenMembership::No(maxflow::OwenRejection::InessentialEdgePaid { edge }) => {
            assert_eq!(edge, 0, "the wide source edge is the one paid");
        }
        other => panic!("expected an inessential-edge rejection, got {other:?}"),
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 01: PASS — worth 2, core Ok, membership rejected (inessential paid) in {elapsed:?}"
    );
}

#[test]
fn criterion_02_unit_path_fairness() {
    for n in 2..=8usize {
        let inst = unit_flow_path(n);
        let expected = vec![ratio(1, n as i64); n];
        let (comb, _) = maxflow::leximin_owen(&inst).unwrap();
        assert_eq!(comb, expected, "combinatorial leximin on the {n}-edge path");
        assert_eq!(
            maxflow::leximin_owen_lp(&inst).unwrap(),
            expected,
            "series leximin on the {n}-edge path"
        );
        assert_eq!(
            maxflow::leximax_owen(&inst).unwrap(),
            expected,
            "leximax on the {n}-edge path"
        );
    }
    println!("criterion 02: PASS — unit paths n=2..8 pay exactly 1/n per edge, both orders");
}

#[test]
fn criterion_03_unit_chain_cost_fairness() {
    for n in 2..=8usize {
        let inst = unit_cost_chain(n);
        assert_eq!(
            branching::leximin_owen(&inst).unwrap(),
            vec![rat(1); n],
            "chain with {n} agents"
        );
    }
    println!("criterion 03: PASS — unit chains n=2..8 charge exactly 1 per agent");
}

#[test]
fn criterion_04_tree_core_point_outside_owen_set() {
    let (_, game, names) = load("fig-tree.game");
    let GameInstance::Branching(inst) = &game else { panic!("fixture kind") };
    let (_, cost) = inst.min_cost_branching().unwrap();
    assert_eq!(cost, rat(6));

    // 2 on each outer vertex, 0 elsewhere: a core point no dual splits.
    let shares: Vec<Rational> = names
        .iter()
        .map(|n| if n.starts_with('v') { rat(2) } else { rat(0) })
        .collect();
    assert_eq!(verify_core(&game, &shares, 16).unwrap(), CoreVerdict::Ok);
    assert_eq!(
        branching::check_owen_membership(inst, &shares).unwrap(),
        branching::OwenMembership::No
    );

    // Frozen regression: the leximin Owen cost-share of this instance.
    let lex = branching::leximin_owen(inst).unwrap();
    let expected = vec![
        rat(1),
        rat(1),
        rat(1),
        ratio(3, 5),
        ratio(3, 5),
        ratio(3, 5),
        ratio(3, 5),
        ratio(3, 5),
    ];
    assert_eq!(lex, expected, "agents {names:?}");
    assert_eq!(
        branching::check_owen_membership(inst, &lex).unwrap(),
        branching::OwenMembership::Yes
    );
    assert_eq!(verify_core(&game, &lex, 16).unwrap(), CoreVerdict::Ok);
    println!(
        "criterion 04: PASS — branching cost 6, (2,2,2,0,...) core Ok but not Owen, \
         leximin regression (1,1,1,3/5,3/5,3/5,3/5,3/5) round-trips"
    );
}

#[test]
fn criterion_05_matching_example() {
    let (_, game, _) = load("bmatching-example.game");
    let GameInstance::BMatching(inst) = &game else { panic!("fixture kind") };
    let (_, value, _) = bmatching::max_weight_bmatching(inst).unwrap();
    assert_eq!(value, rat(4));

    let expected = vec![rat(2), rat(0), rat(2)];
    assert_eq!(bmatching::leximin_owen(inst).unwrap(), expected);
    assert_eq!(bmatching::leximax_owen(inst).unwrap(), expected);

    let lopsided = vec![rat(4), rat(0), rat(0)];
    assert_eq!(verify_core(&game, &lopsided, 16).unwrap(), CoreVerdict::Ok);
    assert!(matches!(
        bmatching::check_owen_membership(inst, &lopsided).unwrap(),
        bmatching::OwenMembership::No(_)
    ));
    println!("criterion 05: PASS — value 4, leximin = leximax = (2,0,2), (4,0,0) core-only");
}

#[test]
fn criterion_06_cross_method_oracles() {
    let started = Instant::now();
    // Combinatorial vs LP-series leximin, 200 seeded flow instances.
    for seed in 0..200u64 {
        let inst = random_maxflow(&GeneratorParams::new(seed));
        let (comb, _) = maxflow::leximin_owen(&inst).unwrap();
        let lp = maxflow::leximin_owen_lp(&inst).unwrap();
        assert_eq!(comb, lp, "flow seed {seed}");
    }
    // Duplication vs direct leximin, 100 seeded matching instances.
    let mut done = 0;
    let mut seed = 0u64;
    while done < 100 {
        let mut params = GeneratorParams::new(seed);
        params.max_vertices = 6;
        params.max_edges = 7;
        seed += 1;
        let inst = random_bmatching(&params);
        if inst.cap_sum() > 12 {
            continue;
        }
        done += 1;
        let direct = bmatching::leximin_owen(&inst).unwrap();
        let (via_dup, _) = bmatching::leximin_owen_via_duplication(&inst, 12).unwrap();
        assert_eq!(direct, via_dup, "matching seed {}", seed - 1);
    }
    println!(
        "criterion 06: PASS — 200 flow instances combinatorial == LP, \
         100 matching instances duplication == direct, exact ({:?})",
        started.elapsed()
    );
}

#[test]
fn criterion_07_core_soundness_sweep() {
    let started = Instant::now();
    let mut checked = 0usize;

    for seed in 0..170u64 {
        let mut params = GeneratorParams::new(seed);
        params.max_edges = 11;
        let inst = random_maxflow(&params);
        let game = GameInstance::MaxFlow(inst.clone());
        let (lex, _) = maxflow::leximin_owen(&inst).unwrap();
        let max = maxflow::leximax_owen(&inst).unwrap();
        let arbitrary = {
            let sol = maxflow::dual_lp(&inst).solve().unwrap();
            assert_eq!(sol.status, LpStatus::Optimal);
            let n = inst.graph().vertex_count();
            let dual = maxflow::FlowDual {
                potentials: sol.primal[..n].to_vec(),
                lengths: sol.primal[n..].to_vec(),
            };
            maxflow::owen_from_dual(&inst, &dual).unwrap()
        };
        for shares in [lex, max, arbitrary] {
            assert_eq!(
                verify_core(&game, &shares, 14).unwrap(),
                CoreVerdict::Ok,
                "flow seed {seed}"
            );
            checked += 1;
        }
    }

    for seed in 0..165u64 {
        let mut params = GeneratorParams::new(seed);
        params.max_vertices = 6;
        params.max_edges = 9;
        let inst = random_branching(&params);
        let game = GameInstance::Branching(inst.clone());
        for shares in [
            branching::leximin_owen(&inst).unwrap(),
            branching::leximax_owen(&inst).unwrap(),
            branching::arbitrary_owen(&inst).unwrap(),
        ] {
            assert_eq!(
                verify_core(&game, &shares, 14).unwrap(),
                CoreVerdict::Ok,
                "branching seed {seed}"
            );
            checked += 1;
        }
    }

    for seed in 0..165u64 {
        let inst = random_bmatching(&GeneratorParams::new(seed));
        if inst.agent_count() > 14 {
            continue;
        }
        let game = GameInstance::BMatching(inst.clone());
        let arbitrary = {
            let (_, _, dual) = bmatching::max_weight_bmatching(&inst).unwrap();
            bmatching::owen_from_dual(&inst, &dual).unwrap()
        };
        for shares in [
            bmatching::leximin_owen(&inst).unwrap(),
            bmatching::leximax_owen(&inst).unwrap(),
            arbitrary,
        ] {
            assert_eq!(
                verify_core(&game, &shares, 14).unwrap(),
                CoreVerdict::Ok,
                "matching seed {seed}"
            );
            checked += 1;
        }
    }

    assert!(checked >= 1500, "checked {checked} imputations over 500 instances");
    println!(
        "criterion 07: PASS — {checked} Owen imputations over 500 instances, zero core \
         violations ({:?})",
        started.elapsed()
    );
}

/// Explicit share-floor LP over all (set, member) variables; no constraint
/// generation anywhere near it.
fn enumerated_first_round(inst: &branching::BranchingInstance) -> Rational {
    let g = inst.graph();
    let agents = inst.agents();
    let n = agents.len();
    let opt = inst.worth().unwrap();
    let mut pairs: Vec<(u32, usize)> = Vec::new();
    for mask in 1u32..(1 << n) {
        for ai in 0..n {
            if mask & (1 << ai) != 0 {
                pairs.push((mask, ai));
            }
        }
    }
    let agent_index = |v: usize| agents.iter().position(|&a| a == v);
    let mut lp = LinearProgram::new(Sense::Maximize);
    for (mask, ai) in &pairs {
        lp.add_var(format!("y_{mask}_{ai}"), VarKind::NonNeg);
    }
    let alpha = lp.add_var("alpha", VarKind::Free);
    lp.set_objective(vec![(alpha, rat(1))]).unwrap();
    for (e, t, h) in g.edges() {
        let coeffs: Vec<(usize, Rational)> = pairs
            .iter()
            .enumerate()
            .filter(|(_, (mask, _))| {
                let tin = agent_index(t).is_some_and(|ai| mask & (1 << ai) != 0);
                let hin = agent_index(h).is_some_and(|ai| mask & (1 << ai) != 0);
                tin && !hin
            })
            .map(|(idx, _)| (idx, rat(1)))
            .collect();
        lp.add_constraint(coeffs, Relation::Le, inst.costs()[e].clone()).unwrap();
    }
    for ai in 0..n {
        let mut coeffs: Vec<(usize, Rational)> = pairs
            .iter()
            .enumerate()
            .filter(|(_, (_, member))| *member == ai)
            .map(|(idx, _)| (idx, rat(-1)))
            .collect();
        coeffs.push((alpha, rat(1)));
        lp.add_constraint(coeffs, Relation::Le, owenset::rational::zero()).unwrap();
    }
    let total: Vec<(usize, Rational)> = (0..pairs.len()).map(|idx| (idx, rat(1))).collect();
    lp.add_constraint(total, Relation::Eq, opt).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    sol.objective.unwrap()
}

#[test]
fn criterion_08_constraint_generation_exactness() {
    let started = Instant::now();
    for seed in 0..50u64 {
        let mut params = GeneratorParams::new(seed);
        params.max_vertices = 6; // at most 5 agents, well within the <= 8 bound
        params.max_edges = 9;
        let inst = random_branching(&params);
        let unfixed = vec![None; inst.agent_count()];
        let (generated, _) =
            branching::series_round_optimum(&inst, &unfixed, branching::CutSeries::Floor)
                .unwrap();
        let enumerated = enumerated_first_round(&inst);
        assert_eq!(generated, enumerated, "seed {seed}");
    }
    println!(
        "criterion 08: PASS — 50 branching instances, cut-generated optimum equals the \
         fully enumerated LP optimum exactly ({:?})",
        started.elapsed()
    );
}

#[test]
fn criterion_09_determinism_and_uniqueness() {
    use std::process::Command;
    let binary = env!("CARGO_BIN_EXE_owenset");

    // Byte-identical repeated machine output across all three games.
    for fixture in ["fig-flow.game", "fig-tree.game", "bmatching-example.game"] {
        let path = fixtures().join(fixture);
        for command in ["leximin", "leximax"] {
            let out = |i: u32| {
                let o = Command::new(binary)
                    .args([command, path.to_str().unwrap(), "--format", "machine"])
                    .output()
                    .unwrap();
                assert!(o.status.success(), "{fixture} {command} run {i}");
                o.stdout
            };
            assert_eq!(out(1), out(2), "{command} on {fixture} must be byte-identical");
        }
    }

    // 1000 sampled feasible Owen points per instance never dominate.
    let mut sampled = 0;
    for fixture in ["fig-flow.game", "path-3.game", "parallel-edges.game"] {
        let (_, game, _) = load(fixture);
        let GameInstance::MaxFlow(inst) = &game else { panic!("fixture kind") };
        let (shares, _) = maxflow::leximin_owen(inst).unwrap();
        let problem = maxflow::leximin_problem(inst);
        assert_eq!(
            verify_leximin(&problem, &shares, 1000, 17).unwrap(),
            VerifyOutcome::Ok,
            "{fixture}"
        );
        sampled += 1000;
    }
    {
        let (_, game, _) = load("bmatching-example.game");
        let GameInstance::BMatching(inst) = &game else { panic!("fixture kind") };
        let shares = bmatching::leximin_owen(inst).unwrap();
        let problem = bmatching::leximin_problem(inst);
        assert_eq!(verify_leximin(&problem, &shares, 1000, 17).unwrap(), VerifyOutcome::Ok);
        sampled += 1000;
    }
    println!(
        "criterion 09: PASS — repeated runs byte-identical on 3 fixtures x 2 orders; \
         {sampled} sampled feasible points never dominate a leximin"
    );
}

#[test]
fn criterion_10_scale_smoke() {
    // Flow game at n = 200, m = 2000 through the combinatorial path.
    let inst = (0u64..)
        .map(|seed| {
            let mut p = GeneratorParams::new(seed);
            p.max_vertices = 200;
            p.max_edges = 2000;
            random_maxflow(&p)
        })
        .find(|i| i.graph().vertex_count() == 200)
        .unwrap();
    assert_eq!(inst.graph().edge_count(), 2000);
    let started = Instant::now();
    let (shares, dual) = maxflow::leximin_owen(&inst).unwrap();
    let flow_elapsed = started.elapsed();
    assert!(
        flow_elapsed <= Duration::from_secs(10),
        "combinatorial leximin took {flow_elapsed:?}"
    );
    let total: Rational = shares.iter().cloned().sum();
    assert_eq!(total, inst.worth().unwrap());
    dual.check_feasible(&inst).unwrap();

    // Branching game at 20 agents through constraint generation.
    let inst = (0u64..)
        .map(|seed| {
            let mut p = GeneratorParams::new(seed);
            p.max_vertices = 21;
            p.max_edges = 42;
            random_branching(&p)
        })
        .find(|i| i.agent_count() == 20)
        .unwrap();
    let started = Instant::now();
    let shares = branching::leximin_owen(&inst).unwrap();
    let branching_elapsed = started.elapsed();
    assert!(
        branching_elapsed <= Duration::from_secs(60),
        "branching leximin took {branching_elapsed:?}"
    );
    let total: Rational = shares.iter().cloned().sum();
    assert_eq!(total, inst.worth().unwrap());

    println!(
        "criterion 10: PASS — flow leximin at n=200, m=2000 in {flow_elapsed:?} (budget 10s); \
         branching leximin at 20 agents in {branching_elapsed:?} (budget 60s)"
    );
}

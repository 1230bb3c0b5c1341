//! End-to-end checks of the binary: exit codes, format stability, and the
//! machine-output round trip back through owen-check.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use owenset_cli::instance::InstanceFile;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_owenset")
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

#[test]
fn exit_codes_follow_the_contract() {
    let fig_flow = fixtures().join("fig-flow.game");
    let fig_flow = fig_flow.to_str().unwrap();

    // 0: success.
    assert_eq!(run(&["value", fig_flow]).status.code(), Some(0));
    // 1: a No verdict.
    let no = run(&[
        "owen-check",
        fig_flow,
        "--shares",
        "s->v1=2,v1->v2=0,v1->v3=0,v2->t=0,v3->t=0",
    ]);
    assert_eq!(no.status.code(), Some(1));
    // 2: usage and validation errors.
    assert_eq!(run(&["value", "/nonexistent.game"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate", fig_flow]).status.code(), Some(2));
    let bad_shares = run(&["owen-check", fig_flow, "--shares", "nope=1"]);
    assert_eq!(bad_shares.status.code(), Some(2));
}

#[test]
fn fixtures_parse_serialize_parse_identity() {
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = InstanceFile::parse(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        let canon = parsed.serialize();
        let reparsed = InstanceFile::parse(&canon).unwrap();
        assert_eq!(parsed, reparsed, "{path:?}");
        assert_eq!(canon, reparsed.serialize(), "{path:?}");
        parsed.lower().unwrap_or_else(|e| panic!("{path:?}: {e}"));
    }
}

#[test]
fn machine_output_round_trips_through_owen_check() {
    for fixture in ["path-3.game", "fig-flow.game", "bmatching-example.game", "fig-tree.game"] {
        let path = fixtures().join(fixture);
        let path = path.to_str().unwrap();
        let out = run(&["leximin", path, "--format", "machine"]);
        assert_eq!(out.status.code(), Some(0), "{fixture}");
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let shares = json["shares"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| {
                format!("{}={}", s["agent"].as_str().unwrap(), s["share"].as_str().unwrap())
            })
            .collect::<Vec<_>>()
            .join(",");
        let check = run(&["owen-check", path, "--shares", &shares]);
        assert_eq!(check.status.code(), Some(0), "{fixture}: {shares}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    for fixture in ["fig-flow.game", "bmatching-example.game", "mst-path-3.game"] {
        let path = fixtures().join(fixture);
        let path = path.to_str().unwrap();
        for command in ["leximin", "leximax"] {
            let a = run(&[command, path, "--format", "machine"]);
            let b = run(&[command, path, "--format", "machine"]);
            assert_eq!(a.status.code(), Some(0), "{fixture}");
            assert_eq!(stdout(&a), stdout(&b), "{command} {fixture}");
        }
    }
}

#[test]
fn fixture_answers_are_exact() {
    // Unit path: each edge earns exactly a third.
    let path3 = fixtures().join("path-3.game");
    let out = run(&["leximin", path3.to_str().unwrap(), "--format", "machine"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for s in json["shares"].as_array().unwrap() {
        assert_eq!(s["share"], "1/3");
    }

    // MST path: one unit of cost per agent.
    let mst = fixtures().join("mst-path-3.game");
    let out = run(&["leximin", mst.to_str().unwrap(), "--format", "machine"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for s in json["shares"].as_array().unwrap() {
        assert_eq!(s["share"], "1");
    }

    // Parallel edges: profits follow capacities under the unique dual.
    let par = fixtures().join("parallel-edges.game");
    let out = run(&["leximax", par.to_str().unwrap(), "--format", "machine"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let shares: Vec<&str> =
        json["shares"].as_array().unwrap().iter().map(|s| s["share"].as_str().unwrap()).collect();
    assert_eq!(shares, vec!["1", "2"]);
}

#[test]
fn certify_round_trips() {
    for fixture in ["fig-flow.game", "fig-tree.game", "bmatching-example.game"] {
        let path = fixtures().join(fixture);
        let out = run(&["certify", path.to_str().unwrap(), "--format", "machine"]);
        assert_eq!(out.status.code(), Some(0), "{fixture}");
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let verdicts = json["verdicts"].as_array().unwrap();
        assert!(verdicts.iter().any(|v| v["check"] == "owen-check" && v["result"] == "yes"));
        assert!(verdicts.iter().any(|v| v["check"] == "core-check" && v["result"] == "ok"));
    }
}

#[test]
fn method_both_cross_checks() {
    for (fixture, cmd) in [
        ("fig-flow.game", "leximin"),
        ("fig-tree.game", "leximin"),
        ("bmatching-example.game", "leximin"),
        ("bmatching-example.game", "leximax"),
    ] {
        let path = fixtures().join(fixture);
        let out = run(&[cmd, path.to_str().unwrap(), "--method", "both", "--format", "machine"]);
        assert_eq!(out.status.code(), Some(0), "{fixture}");
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(json["agree"], true, "{fixture}");
    }
    // Requesting a method a game does not support is a usage error.
    let tree = fixtures().join("fig-tree.game");
    let out = run(&["leximin", tree.to_str().unwrap(), "--method", "combinatorial"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn refuter_reports_clean() {
    let path = fixtures().join("parallel-edges.game");
    let out = run(&[
        "leximin",
        path.to_str().unwrap(),
        "--refute",
        "25",
        "--seed",
        "3",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let verdicts = json["verdicts"].as_array().unwrap();
    assert!(verdicts.iter().any(|v| v["check"] == "refute" && v["result"] == "ok"));
}

#[test]
fn zero_worth_instances_are_handled() {
    // Source and sink in different components: worth 0, all-zero shares.
    let dir = std::env::temp_dir().join("owenset-zero-worth-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("disconnected.game");
    std::fs::write(
        &path,
        "game maxflow\nvertex s\nvertex a\nvertex b\nvertex t\n\
         edge s a 3\nedge b t 1/2\nsource s\nsink t\n",
    )
    .unwrap();
    let out = run(&["leximin", path.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["worth"], "0");
    for s in json["shares"].as_array().unwrap() {
        assert_eq!(s["share"], "0");
    }
    // The all-zero imputation is the whole Owen set here.
    let check = run(&["owen-check", path.to_str().unwrap(), "--shares", "s->a=0,b->t=0"]);
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn env_var_bounds_core_check() {
    let path = fixtures().join("path-3.game");
    let out = Command::new(binary())
        .args(["core-check", path.to_str().unwrap(), "--shares", "s->a=1/3,a->b=1/3,b->t=1/3"])
        .env("OWENSET_MAX_AGENTS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "bound of 2 must reject 3 agents");
    // An explicit flag overrides the environment.
    let out = Command::new(binary())
        .args([
            "core-check",
            path.to_str().unwrap(),
            "--shares",
            "s->a=1/3,a->b=1/3,b->t=1/3",
            "--max-agents",
            "8",
        ])
        .env("OWENSET_MAX_AGENTS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

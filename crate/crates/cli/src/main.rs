//! Command-line front end.
//!
//! Exit codes: 0 for success (and Yes verdicts), 1 for No/Violation
//! verdicts, 2 for usage, parse, or validation errors.

use owenset_cli::instance;
use owenset_cli::report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use instance::{parse_shares, InstanceFile};
use owenset::games::{bmatching, branching, maxflow};
use owenset::leximin::{verify_leximin, VerifyOutcome};
use owenset::rational::format_rational;
use owenset::verify::{self, CoreVerdict, GameInstance};
use owenset::Rational;
use report::{shares_to_json, AgentShare, Certificate, Report, Verdict};

const DUPLICATION_CAP_BOUND: u64 = 64;

#[derive(Parser)]
#[command(
    name = "owenset",
    about = "Equitable (leximin/leximax) Owen-set imputations for max-flow, \
             min-cost branching and bipartite b-matching games",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Combinatorial,
    Lp,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Instance file path.
    instance: PathBuf,
    /// Output format; machine output is exact and byte-reproducible.
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Include wall-clock timing in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the leximin Owen imputation.
    Leximin {
        #[command(flatten)]
        common: CommonArgs,
        /// Algorithm: the game's primary path when omitted; `both`
        /// cross-checks two independent routes.
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Sample this many feasible points trying to refute optimality.
        #[arg(long, default_value_t = 0)]
        refute: usize,
        /// Seed for the refutation sampler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compute the leximax Owen imputation.
    Leximax {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Decide whether an imputation is induced by an optimal dual.
    OwenCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Shares as `name=p/q` pairs, comma separated.
        #[arg(long)]
        shares: Option<String>,
        /// File of `name=p/q` lines.
        #[arg(long)]
        shares_file: Option<PathBuf>,
    },
    /// Exhaustively check an imputation against every coalition.
    CoreCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        shares: Option<String>,
        #[arg(long)]
        shares_file: Option<PathBuf>,
        /// Agent bound for the exponential sweep
        /// (default: OWENSET_MAX_AGENTS or 16).
        #[arg(long)]
        max_agents: Option<usize>,
    },
    /// Print the worth of the game.
    Value {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Produce an Owen imputation from an arbitrary optimal dual, with
    /// certificate and round-trip verification.
    Certify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        max_agents: Option<usize>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(common: &CommonArgs) -> Result<(InstanceFile, GameInstance, Vec<String>), Failure> {
    let text = std::fs::read_to_string(&common.instance)
        .map_err(|e| Failure::usage(format!("{}: {e}", common.instance.display())))?;
    let file = InstanceFile::parse(&text)?;
    let (game, names) = file.lower()?;
    Ok((file, game, names))
}

fn load_shares(
    inline: &Option<String>,
    file: &Option<PathBuf>,
    names: &[String],
) -> Result<Vec<Rational>, Failure> {
    let text = match (inline, file) {
        (Some(t), None) => t.clone(),
        (None, Some(p)) => std::fs::read_to_string(p)
            .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        _ => return Err(Failure::usage("provide exactly one of --shares / --shares-file")),
    };
    Ok(parse_shares(&text, names)?)
}

fn agent_bound(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("OWENSET_MAX_AGENTS").ok().and_then(|v| v.parse().ok())
    })
    .unwrap_or(verify::DEFAULT_AGENT_BOUND)
}

fn worth_of(game: &GameInstance) -> Result<Rational, Failure> {
    Ok(game.worth()?)
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Machine => println!("{}", report.render_machine()),
        Format::Human => print!("{}", report.render_human()),
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Leximin { common, method, refute, seed } => {
            let started = Instant::now();
            let (file, game, names) = load(&common)?;
            let (shares, method_used, agree, certificate) =
                equitable_shares(&file, &game, method, Direction::Leximin)?;
            let mut verdicts = Vec::new();
            if refute > 0 {
                let outcome = refutation(&game, &shares, refute, seed)?;
                verdicts.push(outcome);
            }
            let report = Report {
                command: "leximin".into(),
                game: file.kind.tag().into(),
                instance: common.instance.display().to_string(),
                method: Some(method_used),
                worth: format_rational(&worth_of(&game)?),
                shares: Some(shares_to_json(&names, &shares)),
                certificate,
                verdicts,
                agree,
                timing_ms: common.timing.then(|| started.elapsed().as_millis()),
            };
            emit(&report, common.format);
            Ok(if agree == Some(false) { 1 } else { 0 })
        }
        Command::Leximax { common, method } => {
            let started = Instant::now();
            let (file, game, names) = load(&common)?;
            let (shares, method_used, agree, certificate) =
                equitable_shares(&file, &game, method, Direction::Leximax)?;
            let report = Report {
                command: "leximax".into(),
                game: file.kind.tag().into(),
                instance: common.instance.display().to_string(),
                method: Some(method_used),
                worth: format_rational(&worth_of(&game)?),
                shares: Some(shares_to_json(&names, &shares)),
                certificate,
                verdicts: Vec::new(),
                agree,
                timing_ms: common.timing.then(|| started.elapsed().as_millis()),
            };
            emit(&report, common.format);
            Ok(if agree == Some(false) { 1 } else { 0 })
        }
        Command::OwenCheck { common, shares, shares_file } => {
            let started = Instant::now();
            let (file, game, names) = load(&common)?;
            let shares = load_shares(&shares, &shares_file, &names)?;
            let (verdict, certificate) = owen_check(&game, &shares, &names)?;
            let yes = verdict.result == "yes";
            let report = Report {
                command: "owen-check".into(),
                game: file.kind.tag().into(),
                instance: common.instance.display().to_string(),
                method: None,
                worth: format_rational(&worth_of(&game)?),
                shares: Some(shares_to_json(&names, &shares)),
                certificate,
                verdicts: vec![verdict],
                agree: None,
                timing_ms: common.timing.then(|| started.elapsed().as_millis()),
            };
            emit(&report, common.format);
            Ok(u8::from(!yes))
        }
        Command::CoreCheck { common, shares, shares_file, max_agents } => {
            let started = Instant::now();
            let (file, game, names) = load(&common)?;
            let shares = load_shares(&shares, &shares_file, &names)?;
            let bound = agent_bound(max_agents);
            let verdict = verify::verify_core(&game, &shares, bound)?;
            let (ok, detail) = match &verdict {
                CoreVerdict::Ok => (true, None),
                CoreVerdict::Violation { coalition, coalition_value, coalition_share } => {
                    let members: Vec<&str> =
                        coalition.iter().map(|&a| names[a].as_str()).collect();
                    (
                        false,
                        Some(format!(
                            "coalition {{{}}} is worth {} but gets {}",
                            members.join(", "),
                            format_rational(coalition_value),
                            format_rational(coalition_share),
                        )),
                    )
                }
            };
            let report = Report {
                command: "core-check".into(),
                game: file.kind.tag().into(),
                instance: common.instance.display().to_string(),
                method: None,
                worth: format_rational(&worth_of(&game)?),
                shares: Some(shares_to_json(&names, &shares)),
                certificate: None,
                verdicts: vec![Verdict {
                    check: "core-check".into(),
                    result: if ok { "ok" } else { "violation" }.into(),
                    detail,
                }],
                agree: None,
                timing_ms: common.timing.then(|| started.elapsed().as_millis()),
            };
            emit(&report, common.format);
            Ok(u8::from(!ok))
        }
        Command::Value { common } => {
            let started = Instant::now();
            let (file, game, _names) = load(&common)?;
            let report = Report {
                command: "value".into(),
                game: file.kind.tag().into(),
                instance: common.instance.display().to_string(),
                method: None,
                worth: format_rational(&worth_of(&game)?),
                shares: None,
                certificate: None,
                verdicts: Vec::new(),
                agree: None,
                timing_ms: common.timing.then(|| started.elapsed().as_millis()),
            };
            emit(&report, common.format);
            Ok(0)
        }
        Command::Certify { common, max_agents } => {
            let started = Instant::now();
            let (file, game, names) = load(&common)?;
            let (shares, certificate) = arbitrary_owen_shares(&game, &names)?;
            let mut verdicts = Vec::new();
            let (owen, _) = owen_check(&game, &shares, &names)?;
            verdicts.push(Verdict { check: "owen-check".into(), ..owen });
            let bound = agent_bound(max_agents);
            if game.agent_count() <= bound {
                let verdict = verify::verify_core(&game, &shares, bound)?;
                verdicts.push(Verdict {
                    check: "core-check".into(),
                    result: if verdict == CoreVerdict::Ok { "ok" } else { "violation" }.into(),
                    detail: None,
                });
            } else {
                verdicts.push(Verdict {
                    check: "core-check".into(),
                    result: "skipped".into(),
                    detail: Some(format!("{} agents exceed bound {bound}", game.agent_count())),
                });
            }
            let failed = verdicts.iter().any(|v| v.result == "no" || v.result == "violation");
            let report = Report {
                command: "certify".into(),
                game: file.kind.tag().into(),
                instance: common.instance.display().to_string(),
                method: None,
                worth: format_rational(&worth_of(&game)?),
                shares: Some(shares_to_json(&names, &shares)),
                certificate,
                verdicts,
                agree: None,
                timing_ms: common.timing.then(|| started.elapsed().as_millis()),
            };
            emit(&report, common.format);
            Ok(u8::from(failed))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Leximin,
    Leximax,
}

/// Dispatches a leximin/leximax computation, handling `--method both` as a
/// cross-check of two independent routes.
fn equitable_shares(
    file: &InstanceFile,
    game: &GameInstance,
    method: Option<Method>,
    direction: Direction,
) -> Result<(Vec<Rational>, String, Option<bool>, Option<Certificate>), Failure> {
    match game {
        GameInstance::MaxFlow(inst) => {
            let method = method.unwrap_or(match direction {
                Direction::Leximin => Method::Combinatorial,
                Direction::Leximax => Method::Lp,
            });
            match (direction, method) {
                (Direction::Leximin, Method::Combinatorial) => {
                    let (shares, dual) = maxflow::leximin_owen(inst)?;
                    Ok((shares, "combinatorial".into(), None, Some(flow_cert(file, &dual))))
                }
                (Direction::Leximin, Method::Lp) => {
                    let shares = maxflow::leximin_owen_lp(inst)?;
                    Ok((shares, "lp".into(), None, None))
                }
                (Direction::Leximin, Method::Both) => {
                    let (comb, dual) = maxflow::leximin_owen(inst)?;
                    let lp = maxflow::leximin_owen_lp(inst)?;
                    let agree = comb == lp;
                    Ok((comb, "both".into(), Some(agree), Some(flow_cert(file, &dual))))
                }
                (Direction::Leximax, Method::Lp) => {
                    Ok((maxflow::leximax_owen(inst)?, "lp".into(), None, None))
                }
                (Direction::Leximax, _) => Err(Failure::usage(
                    "leximax for the flow game is lp-only; use --method lp",
                )),
            }
        }
        GameInstance::Branching(inst) => {
            let method = method.unwrap_or(Method::Lp);
            match (direction, method) {
                (_, Method::Combinatorial) => Err(Failure::usage(
                    "no combinatorial method for the branching game; use --method lp",
                )),
                (Direction::Leximin, Method::Lp) => {
                    Ok((branching::leximin_owen(inst)?, "lp".into(), None, None))
                }
                (Direction::Leximin, Method::Both) => {
                    let primary = branching::leximin_owen(inst)?;
                    let concise = branching::leximin_owen_concise(inst)?;
                    let agree = primary == concise;
                    Ok((primary, "both".into(), Some(agree), None))
                }
                (Direction::Leximax, Method::Lp) => {
                    Ok((branching::leximax_owen(inst)?, "lp".into(), None, None))
                }
                (Direction::Leximax, Method::Both) => Err(Failure::usage(
                    "the concise cross-check covers leximin only; use --method lp",
                )),
            }
        }
        GameInstance::BMatching(inst) => {
            let method = method.unwrap_or(Method::Lp);
            match (direction, method) {
                (_, Method::Combinatorial) => Err(Failure::usage(
                    "no combinatorial method for the matching game; use --method lp",
                )),
                (Direction::Leximin, Method::Lp) => {
                    Ok((bmatching::leximin_owen(inst)?, "lp".into(), None, None))
                }
                (Direction::Leximax, Method::Lp) => {
                    Ok((bmatching::leximax_owen(inst)?, "lp".into(), None, None))
                }
                (Direction::Leximin, Method::Both) => {
                    let direct = bmatching::leximin_owen(inst)?;
                    let (via_dup, _) =
                        bmatching::leximin_owen_via_duplication(inst, DUPLICATION_CAP_BOUND)?;
                    let agree = direct == via_dup;
                    Ok((direct, "both".into(), Some(agree), None))
                }
                (Direction::Leximax, Method::Both) => {
                    let direct = bmatching::leximax_owen(inst)?;
                    let (via_dup, _) =
                        bmatching::leximax_owen_via_duplication(inst, DUPLICATION_CAP_BOUND)?;
                    let agree = direct == via_dup;
                    Ok((direct, "both".into(), Some(agree), None))
                }
            }
        }
    }
}

fn flow_cert(file: &InstanceFile, dual: &maxflow::FlowDual) -> Certificate {
    let potentials = file
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| AgentShare {
            agent: v.name.clone(),
            share: format_rational(&dual.potentials[i]),
        })
        .collect();
    let names = file.lower().expect("already lowered once").1;
    let lengths = names
        .iter()
        .zip(dual.lengths.iter())
        .map(|(n, d)| AgentShare { agent: n.clone(), share: format_rational(d) })
        .collect();
    Certificate::FlowDual { potentials, lengths }
}

fn owen_check(
    game: &GameInstance,
    shares: &[Rational],
    names: &[String],
) -> Result<(Verdict, Option<Certificate>), Failure> {
    match game {
        GameInstance::MaxFlow(inst) => match maxflow::check_owen_membership(inst, shares)? {
            maxflow::OwenMembership::Yes(dual) => {
                let potentials = (0..dual.potentials.len())
                    .map(|i| AgentShare {
                        agent: format!("v{i}"),
                        share: format_rational(&dual.potentials[i]),
                    })
                    .collect();
                let lengths = names
                    .iter()
                    .zip(dual.lengths.iter())
                    .map(|(n, d)| AgentShare { agent: n.clone(), share: format_rational(d) })
                    .collect();
                Ok((
                    Verdict { check: "owen-check".into(), result: "yes".into(), detail: None },
                    Some(Certificate::FlowDual { potentials, lengths }),
                ))
            }
            maxflow::OwenMembership::No(reason) => {
                let detail = match &reason {
                    maxflow::OwenRejection::InessentialEdgePaid { edge } => {
                        format!("inessential edge paid: {}", names[*edge])
                    }
                    other => other.describe(),
                };
                Ok((
                    Verdict {
                        check: "owen-check".into(),
                        result: "no".into(),
                        detail: Some(detail),
                    },
                    None,
                ))
            }
        },
        GameInstance::Branching(inst) => {
            let verdict = branching::check_owen_membership(inst, shares)?;
            let yes = verdict == branching::OwenMembership::Yes;
            Ok((
                Verdict {
                    check: "owen-check".into(),
                    result: if yes { "yes" } else { "no" }.into(),
                    detail: (!yes).then(|| "no feasible dual packing splits into these shares".into()),
                },
                None,
            ))
        }
        GameInstance::BMatching(inst) => match bmatching::check_owen_membership(inst, shares)? {
            bmatching::OwenMembership::Yes(dual) => {
                let duals = names
                    .iter()
                    .zip(dual.values.iter())
                    .map(|(n, d)| AgentShare { agent: n.clone(), share: format_rational(d) })
                    .collect();
                Ok((
                    Verdict { check: "owen-check".into(), result: "yes".into(), detail: None },
                    Some(Certificate::MatchingDual { duals }),
                ))
            }
            bmatching::OwenMembership::No(reason) => Ok((
                Verdict { check: "owen-check".into(), result: "no".into(), detail: Some(reason) },
                None,
            )),
        },
    }
}

/// An Owen imputation from an arbitrary optimal dual (no fairness
/// objective), with its certificate where the dual is explicit.
fn arbitrary_owen_shares(
    game: &GameInstance,
    names: &[String],
) -> Result<(Vec<Rational>, Option<Certificate>), Failure> {
    match game {
        GameInstance::MaxFlow(inst) => {
            let lp = maxflow::dual_lp(inst);
            let sol = lp.solve()?;
            if sol.status != owenset::lp::LpStatus::Optimal {
                return Err(Failure::usage(format!("dual LP came back {:?}", sol.status)));
            }
            let n = inst.graph().vertex_count();
            let dual = maxflow::FlowDual {
                potentials: sol.primal[..n].to_vec(),
                lengths: sol.primal[n..].to_vec(),
            };
            let shares = maxflow::owen_from_dual(inst, &dual)?;
            let potentials = (0..n)
                .map(|i| AgentShare {
                    agent: format!("v{i}"),
                    share: format_rational(&dual.potentials[i]),
                })
                .collect();
            let lengths = names
                .iter()
                .zip(dual.lengths.iter())
                .map(|(nm, d)| AgentShare { agent: nm.clone(), share: format_rational(d) })
                .collect();
            Ok((shares, Some(Certificate::FlowDual { potentials, lengths })))
        }
        GameInstance::Branching(inst) => Ok((branching::arbitrary_owen(inst)?, None)),
        GameInstance::BMatching(inst) => {
            let (_, _, dual) = bmatching::max_weight_bmatching(inst)?;
            let shares = bmatching::owen_from_dual(inst, &dual)?;
            let duals = names
                .iter()
                .zip(dual.values.iter())
                .map(|(n, d)| AgentShare { agent: n.clone(), share: format_rational(d) })
                .collect();
            Ok((shares, Some(Certificate::MatchingDual { duals })))
        }
    }
}

/// Runs the sampling refuter against a computed leximin imputation.
fn refutation(
    game: &GameInstance,
    shares: &[Rational],
    samples: usize,
    seed: u64,
) -> Result<Verdict, Failure> {
    let problem = match game {
        GameInstance::MaxFlow(inst) => maxflow::leximin_problem(inst),
        GameInstance::BMatching(inst) => bmatching::leximin_problem(inst),
        GameInstance::Branching(_) => {
            return Ok(Verdict {
                check: "refute".into(),
                result: "skipped".into(),
                detail: Some("no sampleable polynomial LP for the branching game".into()),
            })
        }
    };
    match verify_leximin(&problem, shares, samples, seed)? {
        VerifyOutcome::Ok => Ok(Verdict {
            check: "refute".into(),
            result: "ok".into(),
            detail: Some(format!("{samples} samples, none dominate")),
        }),
        VerifyOutcome::Dominated(witness) => Ok(Verdict {
            check: "refute".into(),
            result: "dominated".into(),
            detail: Some(format!(
                "dominated by [{}]",
                witness.iter().map(format_rational).collect::<Vec<_>>().join(", ")
            )),
        }),
    }
}

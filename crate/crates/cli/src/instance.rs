//! Instance file format.
//!
//! Line-oriented plain text, `#` comments, whitespace-separated tokens.
//! Numbers are exact rationals (`p/q` or integers). Example:
//!
//! ```text
//! game maxflow
//! vertex s
//! vertex a
//! vertex t
//! edge s a 2
//! edge a t 1/3
//! source s
//! sink t
//! ```
//!
//! Branching games use `root <name>`; `game mst` declares each edge once
//! and is lowered to the bidirected branching instance. Matching games
//! declare `uvertex <name> <b>` / `vvertex <name> <b>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use owenset::games::bmatching::BMatchingInstance;
use owenset::games::branching::BranchingInstance;
use owenset::games::maxflow::MaxFlowInstance;
use owenset::graph::{CapacityMap, DiGraph};
use owenset::rational::{format_rational, parse_rational};
use owenset::verify::GameInstance;
use owenset::Rational;

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn one_name(tokens: &[&str], line: usize) -> Result<String, ParseError> {
    if tokens.len() != 2 {
        return Err(err(line, format!("expected: {} <vertex>", tokens[0])));
    }
    Ok(tokens[1].to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    MaxFlow,
    Branching,
    Mst,
    BMatching,
}

impl GameKind {
    pub fn tag(self) -> &'static str {
        match self {
            GameKind::MaxFlow => "maxflow",
            GameKind::Branching => "branching",
            GameKind::Mst => "mst",
            GameKind::BMatching => "bmatching",
        }
    }
}

/// A parsed instance file, structurally faithful to the text (vertex order,
/// edge order, exact numbers), before lowering to a game instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub kind: GameKind,
    /// Vertex declarations in file order: name, and capacity for matching
    /// games (`None` elsewhere). Matching vertices carry their side.
    pub vertices: Vec<VertexDecl>,
    pub edges: Vec<(String, String, Rational)>,
    pub source: Option<String>,
    pub sink: Option<String>,
    pub root: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexDecl {
    pub name: String,
    pub side: VertexSide,
    pub cap: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexSide {
    Plain,
    Left,
    Right,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile, ParseError> {
        let mut kind: Option<GameKind> = None;
        let mut vertices: Vec<VertexDecl> = Vec::new();
        let mut edges = Vec::new();
        let mut source = None;
        let mut sink = None;
        let mut root = None;
        let mut seen = BTreeMap::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match tokens[0] {
                "game" => {
                    if tokens.len() != 2 {
                        return Err(err(line, "expected: game <maxflow|branching|mst|bmatching>"));
                    }
                    kind = Some(match tokens[1] {
                        "maxflow" => GameKind::MaxFlow,
                        "branching" => GameKind::Branching,
                        "mst" => GameKind::Mst,
                        "bmatching" => GameKind::BMatching,
                        other => return Err(err(line, format!("unknown game {other:?}"))),
                    });
                }
                "vertex" | "uvertex" | "vvertex" => {
                    let side = match tokens[0] {
                        "vertex" => VertexSide::Plain,
                        "uvertex" => VertexSide::Left,
                        _ => VertexSide::Right,
                    };
                    let want_cap = side != VertexSide::Plain;
                    if tokens.len() != if want_cap { 3 } else { 2 } {
                        return Err(err(
                            line,
                            if want_cap {
                                "expected: uvertex/vvertex <name> <capacity>"
                            } else {
                                "expected: vertex <name>"
                            },
                        ));
                    }
                    let name = tokens[1].to_string();
                    if seen.insert(name.clone(), line).is_some() {
                        return Err(err(line, format!("duplicate vertex {name:?}")));
                    }
                    let cap = if want_cap {
                        let c: u64 = tokens[2]
                            .parse()
                            .map_err(|_| err(line, format!("bad capacity {:?}", tokens[2])))?;
                        if c == 0 {
                            return Err(err(line, "vertex capacity must be at least 1"));
                        }
                        Some(c)
                    } else {
                        None
                    };
                    vertices.push(VertexDecl { name, side, cap });
                }
                "edge" => {
                    if tokens.len() != 4 {
                        return Err(err(line, "expected: edge <tail> <head> <value>"));
                    }
                    let value = parse_rational(tokens[3]).map_err(|e| err(line, e))?;
                    edges.push((tokens[1].to_string(), tokens[2].to_string(), value));
                }
                "source" => {
                    source = Some(one_name(&tokens, line)?);
                }
                "sink" => {
                    sink = Some(one_name(&tokens, line)?);
                }
                "root" => {
                    root = Some(one_name(&tokens, line)?);
                }
                other => return Err(err(line, format!("unknown directive {other:?}"))),
            }
        }

        let kind = kind.ok_or_else(|| err(0, "missing `game` line"))?;
        let file = InstanceFile { kind, vertices, edges, source, sink, root };
        file.validate_shape()?;
        Ok(file)
    }

    fn validate_shape(&self) -> Result<(), ParseError> {
        match self.kind {
            GameKind::MaxFlow => {
                if self.source.is_none() || self.sink.is_none() {
                    return Err(err(0, "maxflow instances need `source` and `sink`"));
                }
                if self.vertices.iter().any(|v| v.side != VertexSide::Plain) {
                    return Err(err(0, "maxflow instances use plain `vertex` lines"));
                }
            }
            GameKind::Branching | GameKind::Mst => {
                if self.root.is_none() {
                    return Err(err(0, "branching instances need `root`"));
                }
                if self.vertices.iter().any(|v| v.side != VertexSide::Plain) {
                    return Err(err(0, "branching instances use plain `vertex` lines"));
                }
            }
            GameKind::BMatching => {
                if self.vertices.iter().any(|v| v.side == VertexSide::Plain) {
                    return Err(err(0, "bmatching vertices must be `uvertex` or `vvertex`"));
                }
            }
        }
        Ok(())
    }

    /// Canonical text rendering; parsing it back yields an equal value.
    #[allow(dead_code)] // exercised by tests and kept as the format contract
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "game {}", self.kind.tag());
        for v in &self.vertices {
            match v.side {
                VertexSide::Plain => {
                    let _ = writeln!(out, "vertex {}", v.name);
                }
                VertexSide::Left => {
                    let _ = writeln!(out, "uvertex {} {}", v.name, v.cap.unwrap_or(1));
                }
                VertexSide::Right => {
                    let _ = writeln!(out, "vvertex {} {}", v.name, v.cap.unwrap_or(1));
                }
            }
        }
        for (t, h, val) in &self.edges {
            let _ = writeln!(out, "edge {t} {h} {}", format_rational(val));
        }
        if let Some(s) = &self.source {
            let _ = writeln!(out, "source {s}");
        }
        if let Some(s) = &self.sink {
            let _ = writeln!(out, "sink {s}");
        }
        if let Some(s) = &self.root {
            let _ = writeln!(out, "root {s}");
        }
        out
    }

    fn vertex_id(&self, name: &str) -> Result<usize, ParseError> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| err(0, format!("unknown vertex {name:?}")))
    }

    /// Lowers the file to a validated game instance plus agent names in the
    /// library's agent order.
    pub fn lower(&self) -> Result<(GameInstance, Vec<String>), ParseError> {
        match self.kind {
            GameKind::MaxFlow => {
                let n = self.vertices.len();
                let mut graph = DiGraph::new(n);
                let mut caps = Vec::new();
                for (t, h, c) in &self.edges {
                    graph
                        .add_edge(self.vertex_id(t)?, self.vertex_id(h)?)
                        .map_err(|e| err(0, e.to_string()))?;
                    caps.push(c.clone());
                }
                let caps = CapacityMap::new(&graph, caps).map_err(|e| err(0, e.to_string()))?;
                let s = self.vertex_id(self.source.as_ref().expect("validated"))?;
                let t = self.vertex_id(self.sink.as_ref().expect("validated"))?;
                let inst =
                    MaxFlowInstance::new(graph, caps, s, t).map_err(|e| err(0, e.to_string()))?;
                Ok((GameInstance::MaxFlow(inst), self.edge_agent_names()))
            }
            GameKind::Branching => {
                let n = self.vertices.len();
                let mut graph = DiGraph::new(n);
                let mut costs = Vec::new();
                for (t, h, c) in &self.edges {
                    graph
                        .add_edge(self.vertex_id(t)?, self.vertex_id(h)?)
                        .map_err(|e| err(0, e.to_string()))?;
                    costs.push(c.clone());
                }
                let root = self.vertex_id(self.root.as_ref().expect("validated"))?;
                let inst = BranchingInstance::new(graph, costs, root)
                    .map_err(|e| err(0, e.to_string()))?;
                let names = self.non_root_vertex_names(root);
                Ok((GameInstance::Branching(inst), names))
            }
            GameKind::Mst => {
                let root = self.vertex_id(self.root.as_ref().expect("validated"))?;
                let undirected: Vec<(usize, usize, Rational)> = self
                    .edges
                    .iter()
                    .map(|(t, h, c)| Ok((self.vertex_id(t)?, self.vertex_id(h)?, c.clone())))
                    .collect::<Result<_, ParseError>>()?;
                let (inst, _origin) =
                    BranchingInstance::bidirected(self.vertices.len(), &undirected, root)
                        .map_err(|e| err(0, e.to_string()))?;
                let names = self.non_root_vertex_names(root);
                Ok((GameInstance::Branching(inst), names))
            }
            GameKind::BMatching => {
                let mut u_names = Vec::new();
                let mut v_names = Vec::new();
                let mut u_caps = Vec::new();
                let mut v_caps = Vec::new();
                for v in &self.vertices {
                    match v.side {
                        VertexSide::Left => {
                            u_names.push(v.name.clone());
                            u_caps.push(v.cap.expect("validated"));
                        }
                        VertexSide::Right => {
                            v_names.push(v.name.clone());
                            v_caps.push(v.cap.expect("validated"));
                        }
                        VertexSide::Plain => unreachable!("validated"),
                    }
                }
                let mut edges = Vec::new();
                for (t, h, w) in &self.edges {
                    let ui = u_names
                        .iter()
                        .position(|n| n == t)
                        .ok_or_else(|| err(0, format!("edge tail {t:?} is not a uvertex")))?;
                    let vj = v_names
                        .iter()
                        .position(|n| n == h)
                        .ok_or_else(|| err(0, format!("edge head {h:?} is not a vvertex")))?;
                    edges.push((ui, vj, w.clone()));
                }
                let mut caps = u_caps;
                caps.extend(v_caps);
                let inst = BMatchingInstance::new(u_names.len(), v_names.len(), edges, caps)
                    .map_err(|e| err(0, e.to_string()))?;
                let mut names = u_names;
                names.extend(v_names);
                Ok((GameInstance::BMatching(inst), names))
            }
        }
    }

    /// Agent names for edge-agent games: `tail->head`, disambiguated with
    /// `#k` when parallel.
    fn edge_agent_names(&self) -> Vec<String> {
        let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
        for (t, h, _) in &self.edges {
            *counts.entry((t.clone(), h.clone())).or_insert(0) += 1;
        }
        let mut used: BTreeMap<(String, String), usize> = BTreeMap::new();
        self.edges
            .iter()
            .map(|(t, h, _)| {
                let key = (t.clone(), h.clone());
                if counts[&key] == 1 {
                    format!("{t}->{h}")
                } else {
                    let k = used.entry(key).or_insert(0);
                    *k += 1;
                    format!("{t}->{h}#{k}")
                }
            })
            .collect()
    }

    fn non_root_vertex_names(&self, root: usize) -> Vec<String> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != root)
            .map(|(_, v)| v.name.clone())
            .collect()
    }
}

/// Parses a share list: comma- or newline-separated `name=rational` pairs.
pub fn parse_shares(
    text: &str,
    agent_names: &[String],
) -> Result<Vec<Rational>, ParseError> {
    let mut by_name: BTreeMap<&str, Rational> = BTreeMap::new();
    for piece in text.split(|c| c == ',' || c == '\n') {
        let piece = piece.split('#').next().unwrap_or("").trim();
        if piece.is_empty() {
            continue;
        }
        let (name, value) = piece
            .split_once('=')
            .ok_or_else(|| err(0, format!("expected name=value, got {piece:?}")))?;
        let value = parse_rational(value).map_err(|e| err(0, e))?;
        if by_name.insert(name.trim(), value).is_some() {
            return Err(err(0, format!("duplicate share for {name:?}")));
        }
    }
    agent_names
        .iter()
        .map(|n| {
            by_name
                .remove(n.as_str())
                .ok_or_else(|| err(0, format!("missing share for agent {n:?}")))
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|shares| {
            if let Some((name, _)) = by_name.into_iter().next() {
                Err(err(0, format!("unknown agent {name:?} in share list")))
            } else {
                Ok(shares)
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use owenset::rational::{rat, ratio};

    const FLOW: &str = "\
game maxflow
vertex s
vertex a
vertex t
edge s a 2
edge a t 1/3
source s
sink t
";

    #[test]
    fn parse_serialize_round_trip() {
        let file = InstanceFile::parse(FLOW).unwrap();
        let text = file.serialize();
        let again = InstanceFile::parse(&text).unwrap();
        assert_eq!(file, again);
        assert_eq!(text, InstanceFile::parse(&text).unwrap().serialize());
    }

    #[test]
    fn lower_maxflow() {
        let file = InstanceFile::parse(FLOW).unwrap();
        let (game, names) = file.lower().unwrap();
        assert_eq!(names, vec!["s->a", "a->t"]);
        match game {
            GameInstance::MaxFlow(inst) => {
                assert_eq!(inst.agent_count(), 2);
                assert_eq!(*inst.capacities().get(1), ratio(1, 3));
            }
            _ => panic!("wrong game kind"),
        }
    }

    #[test]
    fn parallel_edges_get_distinct_names() {
        let text = "game maxflow\nvertex s\nvertex t\nedge s t 1\nedge s t 2\nsource s\nsink t\n";
        let file = InstanceFile::parse(text).unwrap();
        let (_, names) = file.lower().unwrap();
        assert_eq!(names, vec!["s->t#1", "s->t#2"]);
    }

    #[test]
    fn rejects_malformed_files() {
        for (text, needle) in [
            ("vertex a\n", "missing `game`"),
            ("game maxflow\nvertex a\nvertex a\nsource a\nsink a\n", "duplicate vertex"),
            ("game maxflow\nvertex s\nvertex t\nsource s\n", "need `source` and `sink`"),
            ("game bmatching\nvertex x\n", "uvertex"),
            ("game maxflow\nvertex s\nvertex t\nedge s q 1\nsource s\nsink t\n", "unknown vertex"),
            ("game bmatching\nuvertex u 0\n", "at least 1"),
        ] {
            let e = InstanceFile::parse(text).and_then(|f| f.lower().map(|_| ()));
            let msg = format!("{}", e.unwrap_err());
            assert!(msg.contains(needle), "{text:?} -> {msg}");
        }
    }

    #[test]
    fn mst_lowering_is_bidirected() {
        let text = "game mst\nvertex r\nvertex a\nvertex b\nedge r a 1\nedge a b 2\nroot r\n";
        let (game, names) = InstanceFile::parse(text).unwrap().lower().unwrap();
        assert_eq!(names, vec!["a", "b"]);
        match game {
            GameInstance::Branching(inst) => {
                assert_eq!(inst.graph().edge_count(), 4);
                assert_eq!(inst.worth().unwrap(), rat(3));
            }
            _ => panic!("wrong game kind"),
        }
    }

    #[test]
    fn share_lists() {
        let names = vec!["a".to_string(), "b".to_string()];
        let shares = parse_shares("a=1/2, b=3", &names).unwrap();
        assert_eq!(shares, vec![ratio(1, 2), rat(3)]);
        assert!(parse_shares("a=1/2", &names).is_err());
        assert!(parse_shares("a=1, b=2, c=3", &names).is_err());
        assert!(parse_shares("a=x, b=2", &names).is_err());
    }
}

//! Result reporting: exact machine-readable JSON and a human rendering
//! with clearly marked decimal approximations.

use serde::Serialize;

use owenset::rational::{approx_decimal, format_rational};
use owenset::Rational;

#[derive(Debug, Clone, Serialize)]
pub struct AgentShare {
    pub agent: String,
    pub share: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub check: String,
    pub result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    FlowDual { potentials: Vec<AgentShare>, lengths: Vec<AgentShare> },
    MatchingDual { duals: Vec<AgentShare> },
}

/// One command's full result. Machine output is this struct as JSON with
/// rationals rendered exactly; `timing_ms` is included only on request so
/// default output is byte-reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub game: String,
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub worth: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shares: Option<Vec<AgentShare>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

pub fn shares_to_json(names: &[String], shares: &[Rational]) -> Vec<AgentShare> {
    names
        .iter()
        .zip(shares.iter())
        .map(|(n, s)| AgentShare { agent: n.clone(), share: format_rational(s) })
        .collect()
}

impl Report {
    pub fn render_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_human(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "{} on {} ({})", self.command, self.game, self.instance);
        if let Some(m) = &self.method {
            let _ = writeln!(out, "method: {m}");
        }
        let _ = writeln!(out, "worth: {}", exact_and_approx(&self.worth));
        if let Some(shares) = &self.shares {
            let width = shares.iter().map(|s| s.agent.len()).max().unwrap_or(0);
            let _ = writeln!(out, "shares:");
            for s in shares {
                let _ =
                    writeln!(out, "  {:width$}  {}", s.agent, exact_and_approx(&s.share));
            }
        }
        if let Some(cert) = &self.certificate {
            match cert {
                Certificate::FlowDual { potentials, lengths } => {
                    let _ = writeln!(out, "certificate (optimal dual):");
                    for p in potentials {
                        let _ = writeln!(out, "  potential {}  {}", p.agent, p.share);
                    }
                    for l in lengths {
                        let _ = writeln!(out, "  length {}  {}", l.agent, l.share);
                    }
                }
                Certificate::MatchingDual { duals } => {
                    let _ = writeln!(out, "certificate (optimal dual):");
                    for d in duals {
                        let _ = writeln!(out, "  dual {}  {}", d.agent, d.share);
                    }
                }
            }
        }
        for v in &self.verdicts {
            match &v.detail {
                Some(d) => {
                    let _ = writeln!(out, "{}: {} ({d})", v.check, v.result);
                }
                None => {
                    let _ = writeln!(out, "{}: {}", v.check, v.result);
                }
            }
        }
        if let Some(agree) = self.agree {
            let _ = writeln!(out, "agree: {agree}");
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "elapsed: {ms} ms");
        }
        out
    }
}

fn exact_and_approx(exact: &str) -> String {
    match exact.parse::<Rational>() {
        Ok(r) => format!("{exact} (~{})", approx_decimal(&r)),
        Err(_) => exact.to_string(),
    }
}

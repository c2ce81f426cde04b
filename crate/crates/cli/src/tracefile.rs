//! Trace files: a header pinning the run configuration, one tagged line per
//! turn-phase record, and an outcome footer. Rendering a run twice with the
//! same inputs yields byte-identical text, so `verify` can re-execute the
//! header and compare.

use mapfma_core::adversary::{MalfunctionPlan, TieBreakPolicy};
use mapfma_core::engine::{Action, Intent, Protocol, RunResult};
use mapfma_core::model::{AgentId, Instance, VertexId};
use sha2::{Digest, Sha256};

use crate::formats::{write_instance, write_plan_spec, write_priority_spec};

pub fn instance_hash(instance: &Instance) -> String {
    let mut hasher = Sha256::new();
    hasher.update(write_instance(instance).as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct TraceHeader<'a> {
    pub instance: &'a Instance,
    pub protocol: Protocol,
    pub policy: &'a TieBreakPolicy,
    pub plan: &'a MalfunctionPlan,
    pub priorities: &'a [((u32, VertexId), AgentId)],
    pub budget: Option<u32>,
}

pub fn render_trace(header: &TraceHeader, result: &RunResult) -> String {
    let instance = header.instance;
    let label = |a: AgentId| instance.agents[a.index()].label.as_str();
    let vlabel = |v: VertexId| instance.graph.label(v);

    let mut out = String::from("# mapfma trace v1\n");
    out.push_str(&format!("instance sha256:{}\n", instance_hash(instance)));
    out.push_str(&format!("protocol {}\n", header.protocol));
    out.push_str(&format!("policy {}\n", header.policy));
    out.push_str(&format!(
        "plan {}\n",
        write_plan_spec(header.plan.events(), instance)
    ));
    out.push_str(&format!(
        "priorities {}\n",
        write_priority_spec(header.priorities, instance)
    ));
    match header.budget {
        Some(b) => out.push_str(&format!("budget {b}\n")),
        None => out.push_str("budget default\n"),
    }
    for record in &result.trace {
        let t = record.turn;
        for &(agent, intent) in &record.decisions {
            let detail = match intent {
                Intent::Move(v) => format!("move {}", vlabel(v)),
                Intent::Stay => "stay".into(),
                Intent::Malfunction => "malfunction".into(),
            };
            out.push_str(&format!("T{t} D {} {detail}\n", label(agent)));
        }
        for choice in &record.choices {
            let cands: Vec<&str> = choice.candidates.iter().map(|&a| label(a)).collect();
            out.push_str(&format!(
                "T{t} C {} {} -> {}\n",
                vlabel(choice.vertex),
                cands.join(","),
                label(choice.chosen)
            ));
        }
        for &(agent, reason) in &record.modifications {
            out.push_str(&format!("T{t} M {} delay {reason}\n", label(agent)));
        }
        for &(agent, action) in &record.actions {
            let detail = match action {
                Action::Move(v) => format!("move {}", vlabel(v)),
                Action::Stay => "stay".into(),
            };
            out.push_str(&format!("T{t} A {} {detail}\n", label(agent)));
        }
    }
    out.push_str(&format!("end {} makespan {}\n", result.outcome, result.makespan));
    out
}

/// Parsed header of a trace file; replay settings for `verify`.
pub struct ParsedHeader {
    pub instance_hash: String,
    pub protocol: Protocol,
    pub policy: TieBreakPolicy,
    pub plan_spec: String,
    pub priorities_spec: String,
    pub budget: Option<u32>,
}

pub fn parse_header(text: &str) -> Result<ParsedHeader, String> {
    let mut hash = None;
    let mut protocol = None;
    let mut policy = None;
    let mut plan_spec = None;
    let mut priorities_spec = None;
    let mut budget = None;
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        let Some((keyword, rest)) = line.split_once(' ') else {
            break;
        };
        match keyword {
            "instance" => {
                hash = rest
                    .strip_prefix("sha256:")
                    .map(str::to_string)
                    .or_else(|| Some(rest.to_string()));
            }
            "protocol" => protocol = Some(rest.parse::<Protocol>()?),
            "policy" => policy = Some(rest.parse::<TieBreakPolicy>()?),
            "plan" => plan_spec = Some(rest.to_string()),
            "priorities" => priorities_spec = Some(rest.to_string()),
            "budget" => {
                budget = if rest == "default" {
                    Some(None)
                } else {
                    Some(Some(rest.parse::<u32>().map_err(|_| {
                        format!("bad budget `{rest}` in trace header")
                    })?))
                };
            }
            _ => break, // first record line ends the header
        }
        if hash.is_some()
            && protocol.is_some()
            && policy.is_some()
            && plan_spec.is_some()
            && priorities_spec.is_some()
            && budget.is_some()
        {
            break;
        }
    }
    Ok(ParsedHeader {
        instance_hash: hash.ok_or("trace header missing instance hash")?,
        protocol: protocol.ok_or("trace header missing protocol")?,
        policy: policy.ok_or("trace header missing policy")?,
        plan_spec: plan_spec.ok_or("trace header missing plan")?,
        priorities_spec: priorities_spec.ok_or("trace header missing priorities")?,
        budget: budget.ok_or("trace header missing budget")?,
    })
}

/// Turn number of the first line where two traces diverge, if any.
pub fn first_divergence(expected: &str, found: &str) -> Option<(u32, String)> {
    let mut expected_lines = expected.lines();
    let mut found_lines = found.lines();
    loop {
        match (expected_lines.next(), found_lines.next()) {
            (None, None) => return None,
            (e, f) if e == f => continue,
            (e, f) => {
                let line = f.or(e).unwrap_or("");
                let turn = line
                    .strip_prefix('T')
                    .and_then(|rest| rest.split_whitespace().next())
                    .and_then(|t| t.parse().ok())
                    .unwrap_or(0);
                return Some((turn, line.to_string()));
            }
        }
    }
}

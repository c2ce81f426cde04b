//! Line-oriented file formats. Everything written is order-canonical
//! (vertices by id, edges lexicographic, agents by id), so artifact equality
//! is byte equality.

use std::collections::HashMap;
use std::fmt;

use mapfma_core::model::{
    AgentId, AgentSpec, DelayEvent, Graph, Instance, Schedule, VertexId,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Instance grammar, one declaration per line:
/// `graph <n>`, `vertex <label>`, `edge <u> <v>`,
/// `agent <id> <source> <target>`, `makespan <ell>`; `#` comments.
/// Vertex tokens are labels; `vertex` lines pin ids in declaration order,
/// otherwise labels are assigned dense ids on first use.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut declared: Option<usize> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut edges: Vec<(u32, u32, usize)> = Vec::new();
    let mut agents: Vec<(String, u32, u32, usize)> = Vec::new();
    let mut makespan: Option<u32> = None;

    let intern = |labels: &mut Vec<String>, index: &mut HashMap<String, u32>, token: &str| {
        if let Some(&id) = index.get(token) {
            id
        } else {
            let id = labels.len() as u32;
            labels.push(token.to_string());
            index.insert(token.to_string(), id);
            id
        }
    };

    for (line_no, line) in content_lines(text) {
        let mut parts = line.split_whitespace();
        let keyword = parts.next().expect("nonempty line");
        let rest: Vec<&str> = parts.collect();
        match keyword {
            "graph" => {
                let [n] = rest[..] else {
                    return Err(ParseError::new(line_no, "expected `graph <n>`"));
                };
                declared = Some(n.parse().map_err(|_| {
                    ParseError::new(line_no, format!("bad vertex count `{n}`"))
                })?);
            }
            "vertex" => {
                let [label] = rest[..] else {
                    return Err(ParseError::new(line_no, "expected `vertex <label>`"));
                };
                if index.contains_key(label) {
                    return Err(ParseError::new(line_no, format!("duplicate vertex `{label}`")));
                }
                intern(&mut labels, &mut index, label);
            }
            "edge" => {
                let [u, v] = rest[..] else {
                    return Err(ParseError::new(line_no, "expected `edge <u> <v>`"));
                };
                let u = intern(&mut labels, &mut index, u);
                let v = intern(&mut labels, &mut index, v);
                edges.push((u, v, line_no));
            }
            "agent" => {
                let [id, source, target] = rest[..] else {
                    return Err(ParseError::new(line_no, "expected `agent <id> <source> <target>`"));
                };
                if agents.iter().any(|(label, ..)| label == id) {
                    return Err(ParseError::new(line_no, format!("duplicate agent id `{id}`")));
                }
                let s = intern(&mut labels, &mut index, source);
                let t = intern(&mut labels, &mut index, target);
                agents.push((id.to_string(), s, t, line_no));
            }
            "makespan" => {
                let [ell] = rest[..] else {
                    return Err(ParseError::new(line_no, "expected `makespan <ell>`"));
                };
                makespan = Some(ell.parse().map_err(|_| {
                    ParseError::new(line_no, format!("bad makespan `{ell}`"))
                })?);
            }
            other => {
                return Err(ParseError::new(line_no, format!("unknown declaration `{other}`")));
            }
        }
    }

    if let Some(n) = declared {
        if n != labels.len() {
            return Err(ParseError::new(
                0,
                format!("graph declares {n} vertices but {} labels appear", labels.len()),
            ));
        }
    }
    let mut graph = Graph::with_labels(labels)
        .map_err(|e| ParseError::new(0, e.to_string()))?;
    for (u, v, line_no) in edges {
        graph
            .add_edge(VertexId(u), VertexId(v))
            .map_err(|e| ParseError::new(line_no, e.to_string()))?;
    }
    let agents = agents
        .into_iter()
        .enumerate()
        .map(|(i, (label, s, t, _))| AgentSpec {
            id: AgentId(i as u32),
            label,
            source: VertexId(s),
            target: VertexId(t),
        })
        .collect();
    Ok(Instance::new(graph, agents, makespan.unwrap_or(0)))
}

pub fn write_instance(instance: &Instance) -> String {
    let g = &instance.graph;
    let mut out = String::from("# mapfma instance\n");
    out.push_str(&format!("graph {}\n", g.vertex_count()));
    for v in g.vertices() {
        out.push_str(&format!("vertex {}\n", g.label(v)));
    }
    let mut edge_lines: Vec<String> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (g.label(u), g.label(v));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            format!("edge {a} {b}\n")
        })
        .collect();
    edge_lines.sort();
    for line in edge_lines {
        out.push_str(&line);
    }
    for spec in &instance.agents {
        out.push_str(&format!(
            "agent {} {} {}\n",
            spec.label,
            g.label(spec.source),
            g.label(spec.target)
        ));
    }
    out.push_str(&format!("makespan {}\n", instance.makespan_ell));
    out
}

/// Schedule grammar: `schedule <mu>` then per agent `<id> <v0> ... <vmu>`.
/// Rows may be non-injective per turn; feasibility is a separate check.
pub fn parse_schedule(text: &str, instance: &Instance) -> Result<Schedule, ParseError> {
    let mut mu: Option<usize> = None;
    let mut rows: Vec<Option<(Vec<VertexId>, usize)>> = vec![None; instance.agent_count()];
    let vertex_index: HashMap<&str, VertexId> = instance
        .graph
        .vertices()
        .map(|v| (instance.graph.label(v), v))
        .collect();
    let agent_index: HashMap<&str, AgentId> = instance
        .agents
        .iter()
        .map(|a| (a.label.as_str(), a.id))
        .collect();
    for (line_no, line) in content_lines(text) {
        let mut parts = line.split_whitespace();
        let keyword = parts.next().expect("nonempty line");
        if keyword == "schedule" {
            let rest: Vec<&str> = parts.collect();
            let [value] = rest[..] else {
                return Err(ParseError::new(line_no, "expected `schedule <mu>`"));
            };
            mu = Some(value.parse().map_err(|_| {
                ParseError::new(line_no, format!("bad schedule length `{value}`"))
            })?);
            continue;
        }
        let Some(mu) = mu else {
            return Err(ParseError::new(line_no, "row before `schedule <mu>` header"));
        };
        let Some(&agent) = agent_index.get(keyword) else {
            return Err(ParseError::new(line_no, format!("unknown agent `{keyword}`")));
        };
        if rows[agent.index()].is_some() {
            return Err(ParseError::new(line_no, format!("duplicate row for agent `{keyword}`")));
        }
        let mut row = Vec::with_capacity(mu + 1);
        for token in parts {
            match vertex_index.get(token) {
                Some(&v) => row.push(v),
                None => {
                    return Err(ParseError::new(line_no, format!("unknown vertex `{token}`")))
                }
            }
        }
        if row.len() != mu + 1 {
            return Err(ParseError::new(
                line_no,
                format!("row has {} positions, schedule of length {mu} needs {}", row.len(), mu + 1),
            ));
        }
        rows[agent.index()] = Some((row, line_no));
    }
    let mut out = Vec::with_capacity(instance.agent_count());
    for (i, row) in rows.into_iter().enumerate() {
        match row {
            Some((row, _)) => out.push(row),
            None => {
                return Err(ParseError::new(
                    0,
                    format!("missing row for agent `{}`", instance.agents[i].label),
                ))
            }
        }
    }
    Schedule::new(out).map_err(|e| ParseError::new(0, e.to_string()))
}

pub fn write_schedule(schedule: &Schedule, instance: &Instance) -> String {
    let mut out = String::from("# mapfma schedule\n");
    out.push_str(&format!("schedule {}\n", schedule.length_mu()));
    for spec in &instance.agents {
        let cells: Vec<&str> = schedule
            .row(spec.id)
            .iter()
            .map(|&v| instance.graph.label(v))
            .collect();
        out.push_str(&format!("{} {}\n", spec.label, cells.join(" ")));
    }
    out
}

/// Malfunction plan flag syntax: comma-separated `turn:agent`, `-` for none.
pub fn parse_plan_spec(
    spec: &str,
    instance: &Instance,
) -> Result<Vec<(u32, AgentId)>, String> {
    let spec = spec.trim();
    if spec.is_empty() || spec == "-" {
        return Ok(Vec::new());
    }
    let mut events = Vec::new();
    for part in spec.split(',') {
        let Some((turn, agent)) = part.split_once(':') else {
            return Err(format!("bad plan entry `{part}` (expected turn:agent)"));
        };
        let turn: u32 = turn
            .parse()
            .map_err(|_| format!("bad turn in plan entry `{part}`"))?;
        let Some(id) = instance.agent_by_label(agent) else {
            return Err(format!("unknown agent `{agent}` in plan"));
        };
        events.push((turn, id));
    }
    Ok(events)
}

pub fn write_plan_spec(events: &[(u32, AgentId)], instance: &Instance) -> String {
    if events.is_empty() {
        return "-".into();
    }
    events
        .iter()
        .map(|&(t, a)| format!("{t}:{}", instance.agents[a.index()].label))
        .collect::<Vec<_>>()
        .join(",")
}

/// Pinned contention winners: `(turn, vertex) -> agent`.
pub type PriorityScript = Vec<((u32, VertexId), AgentId)>;

/// Priority script flag syntax: comma-separated `turn:vertex=agent`.
pub fn parse_priority_spec(
    spec: &str,
    instance: &Instance,
) -> Result<PriorityScript, String> {
    let spec = spec.trim();
    if spec.is_empty() || spec == "-" {
        return Ok(Vec::new());
    }
    let mut entries = Vec::new();
    for part in spec.split(',') {
        let bad = || format!("bad priority entry `{part}` (expected turn:vertex=agent)");
        let Some((turn, rest)) = part.split_once(':') else {
            return Err(bad());
        };
        let Some((vertex, agent)) = rest.split_once('=') else {
            return Err(bad());
        };
        let turn: u32 = turn.parse().map_err(|_| bad())?;
        let Some(v) = instance.graph.vertex_by_label(vertex) else {
            return Err(format!("unknown vertex `{vertex}` in priority entry"));
        };
        let Some(a) = instance.agent_by_label(agent) else {
            return Err(format!("unknown agent `{agent}` in priority entry"));
        };
        entries.push(((turn, v), a));
    }
    Ok(entries)
}

pub fn write_priority_spec(
    entries: &[((u32, VertexId), AgentId)],
    instance: &Instance,
) -> String {
    if entries.is_empty() {
        return "-".into();
    }
    entries
        .iter()
        .map(|&((t, v), a)| {
            format!(
                "{t}:{}={}",
                instance.graph.label(v),
                instance.agents[a.index()].label
            )
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Delay event file: `delay <turn> <agent>...` lines, nondecreasing turns.
pub fn parse_delays(text: &str, instance: &Instance) -> Result<Vec<DelayEvent>, ParseError> {
    let mut events = Vec::new();
    for (line_no, line) in content_lines(text) {
        let mut parts = line.split_whitespace();
        if parts.next() != Some("delay") {
            return Err(ParseError::new(line_no, "expected `delay <turn> <agent>...`"));
        }
        let Some(turn) = parts.next().and_then(|t| t.parse::<u32>().ok()) else {
            return Err(ParseError::new(line_no, "bad delay turn"));
        };
        let mut agents = Vec::new();
        for token in parts {
            let Some(id) = instance.agent_by_label(token) else {
                return Err(ParseError::new(line_no, format!("unknown agent `{token}`")));
            };
            agents.push(id);
        }
        if agents.is_empty() {
            return Err(ParseError::new(line_no, "delay event needs at least one agent"));
        }
        events.push(DelayEvent::voluntary(turn, agents));
    }
    Ok(events)
}

pub fn write_delays(events: &[DelayEvent], instance: &Instance) -> String {
    let mut out = String::from("# mapfma delays\n");
    for event in events {
        let agents: Vec<&str> = event
            .agents
            .iter()
            .map(|&a| instance.agents[a.index()].label.as_str())
            .collect();
        out.push_str(&format!("delay {} {}\n", event.turn, agents.join(" ")));
    }
    out
}

/// Assignment flag: one `1`/`t` or `0`/`f` per variable, e.g. `10` or `tf`.
pub fn parse_assignment(spec: &str, num_vars: u32) -> Result<Vec<bool>, String> {
    let values: Result<Vec<bool>, String> = spec
        .chars()
        .map(|c| match c {
            '1' | 't' | 'T' => Ok(true),
            '0' | 'f' | 'F' => Ok(false),
            other => Err(format!("bad assignment character `{other}`")),
        })
        .collect();
    let values = values?;
    if values.len() != num_vars as usize {
        return Err(format!(
            "assignment has {} values, formula has {num_vars} variables",
            values.len()
        ));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mapfma_core::gen::{gen_fig1, gen_fig2};

    #[test]
    fn fig1_instance_round_trips() {
        let (instance, _) = gen_fig1();
        let text = write_instance(&instance);
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed, instance);
        // write . parse is the identity on canonical text.
        assert_eq!(write_instance(&parsed), text);
    }

    #[test]
    fn fig2_round_trip_has_42_vertices() {
        let (instance, schedule) = gen_fig2();
        let parsed = parse_instance(&write_instance(&instance)).unwrap();
        assert_eq!(parsed, instance);
        assert_eq!(parsed.graph.vertex_count(), 42);
        let sched_text = write_schedule(&schedule, &instance);
        let parsed_sched = parse_schedule(&sched_text, &parsed).unwrap();
        assert_eq!(parsed_sched, schedule);
    }

    #[test]
    fn terse_instance_without_vertex_lines_parses() {
        let text = "graph 3\nedge a b\nedge b c\nagent walker a c\nmakespan 2\n";
        let instance = parse_instance(text).unwrap();
        assert_eq!(instance.graph.vertex_count(), 3);
        assert_eq!(instance.agents[0].label, "walker");
        assert_eq!(instance.makespan_ell, 2);
    }

    #[test]
    fn duplicate_agent_reports_its_line() {
        let text = "edge a b\nagent x a b\nagent x b a\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("duplicate agent"));
    }

    #[test]
    fn schedule_row_arity_is_enforced() {
        let (instance, _) = gen_fig1();
        let text = "schedule 2\na1 u1 u1\na2 u4 u2 u3\n";
        let err = parse_schedule(text, &instance).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn non_injective_turns_are_accepted_at_parse_time() {
        let (instance, _) = gen_fig1();
        let text = "schedule 1\na1 u1 u2\na2 u4 u2\n";
        assert!(parse_schedule(text, &instance).is_ok());
    }

    #[test]
    fn plan_and_priority_specs_round_trip() {
        let (instance, _) = gen_fig2();
        let plan = parse_plan_spec("4:a1,7:b1_2", &instance).unwrap();
        assert_eq!(write_plan_spec(&plan, &instance), "4:a1,7:b1_2");
        assert_eq!(parse_plan_spec("-", &instance).unwrap(), vec![]);
        let prios = parse_priority_spec("7:c3=b1_3", &instance).unwrap();
        assert_eq!(write_priority_spec(&prios, &instance), "7:c3=b1_3");
        assert!(parse_plan_spec("4:nobody", &instance).is_err());
        assert!(parse_priority_spec("7:c9=a1", &instance).is_err());
    }

    #[test]
    fn delay_files_round_trip() {
        let (instance, _) = gen_fig1();
        let events = vec![
            DelayEvent::voluntary(1, [AgentId(0), AgentId(1)]),
            DelayEvent::voluntary(2, [AgentId(0)]),
        ];
        let text = write_delays(&events, &instance);
        assert_eq!(parse_delays(&text, &instance).unwrap(), events);
    }

    #[test]
    fn assignments_parse() {
        assert_eq!(parse_assignment("10", 2).unwrap(), vec![true, false]);
        assert_eq!(parse_assignment("tf", 2).unwrap(), vec![true, false]);
        assert!(parse_assignment("1", 2).is_err());
        assert!(parse_assignment("1x", 2).is_err());
    }
}

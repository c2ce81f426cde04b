//! Static problem model: graph, agents, schedules and instance validation.

mod delay;
mod feasibility;

pub use delay::{apply_delay1, apply_delay_sequence};
pub use feasibility::{check_feasible, FeasibilityVerdict, FeasibilityViolation};

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// Dense vertex identifier (index into the graph's vertex table).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Dense agent identifier (index into the instance's agent roster).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),
    #[error("self-loop on vertex {0:?}")]
    SelfLoop(VertexId),
    #[error("parallel edge {0:?}-{1:?}")]
    ParallelEdge(VertexId, VertexId),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(VertexId),
    #[error("unknown agent {0:?}")]
    UnknownAgent(AgentId),
    #[error("schedule has no rows")]
    EmptySchedule,
    #[error("schedule rows have unequal lengths")]
    RaggedSchedule,
    #[error("schedule row for agent {0:?} is empty")]
    EmptyRow(AgentId),
    #[error("schedule defines {found} agents, instance has {expected}")]
    AgentCountMismatch { expected: usize, found: usize },
    #[error("delay turn {turn} out of range 1..={mu}")]
    TurnOutOfRange { turn: u32, mu: u32 },
    #[error("delay-1 requires a nonempty agent set")]
    EmptyDelaySet,
    #[error("delay events not sorted nondecreasing by turn ({prev} before {next})")]
    UnsortedEvents { prev: u32, next: u32 },
    #[error("target of agent {0:?} is unreachable from its source")]
    UnreachableTarget(AgentId),
}

/// Undirected simple graph with dense vertex ids and string labels.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    labels: Vec<String>,
}

impl Graph {
    /// Graph on `n` vertices labelled `v0..v{n-1}` with no edges.
    pub fn new(n: usize) -> Graph {
        Graph {
            adjacency: vec![Vec::new(); n],
            labels: (0..n).map(|i| format!("v{i}")).collect(),
        }
    }

    /// Graph whose vertices carry the given (distinct) labels.
    pub fn with_labels(labels: Vec<String>) -> Result<Graph, ModelError> {
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.clone(), i).is_some() {
                return Err(ModelError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Graph {
            adjacency: vec![Vec::new(); labels.len()],
            labels,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.adjacency.len() as u32).map(VertexId)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.adjacency.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| VertexId(i as u32))
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), ModelError> {
        if !self.contains(u) {
            return Err(ModelError::UnknownVertex(u));
        }
        if !self.contains(v) {
            return Err(ModelError::UnknownVertex(v));
        }
        if u == v {
            return Err(ModelError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(ModelError::ParallelEdge(u, v));
        }
        let pos = self.adjacency[u.index()].binary_search(&v).unwrap_err();
        self.adjacency[u.index()].insert(pos, v);
        let pos = self.adjacency[v.index()].binary_search(&u).unwrap_err();
        self.adjacency[v.index()].insert(pos, u);
        Ok(())
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.contains(u) && self.adjacency[u.index()].binary_search(&v).is_ok()
    }

    /// Neighbors of `v`, sorted by vertex id.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// All edges as `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for u in self.vertices() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Breadth-first hop distances from `src`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, src: VertexId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[src.index()] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()].unwrap();
            for &w in self.neighbors(u) {
                if dist[w.index()].is_none() {
                    dist[w.index()] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Graph({} vertices, {} edges)",
            self.vertex_count(),
            self.edge_count()
        )
    }
}

/// One agent: where it starts and where it must end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentSpec {
    pub id: AgentId,
    pub label: String,
    pub source: VertexId,
    pub target: VertexId,
}

/// A MAPF input: graph, agents and the target makespan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub agents: Vec<AgentSpec>,
    pub makespan_ell: u32,
}

impl Instance {
    pub fn new(graph: Graph, agents: Vec<AgentSpec>, makespan_ell: u32) -> Instance {
        Instance {
            graph,
            agents,
            makespan_ell,
        }
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent(&self, id: AgentId) -> &AgentSpec {
        &self.agents[id.index()]
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.len() as u32).map(AgentId)
    }

    pub fn agent_by_label(&self, label: &str) -> Option<AgentId> {
        self.agents
            .iter()
            .position(|a| a.label == label)
            .map(|i| AgentId(i as u32))
    }
}

/// A broken instance invariant. Violations are data, not failures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceViolation {
    NonDenseAgentId { position: usize, id: AgentId },
    DuplicateAgentLabel { label: String },
    SharedSource { a: AgentId, b: AgentId, vertex: VertexId },
    SharedTarget { a: AgentId, b: AgentId, vertex: VertexId },
    UnknownSource { agent: AgentId, vertex: VertexId },
    UnknownTarget { agent: AgentId, vertex: VertexId },
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InstanceViolation::*;
        match self {
            NonDenseAgentId { position, id } => {
                write!(f, "agent at position {position} has non-dense id {id:?}")
            }
            DuplicateAgentLabel { label } => write!(f, "duplicate agent label `{label}`"),
            SharedSource { a, b, vertex } => {
                write!(f, "agents {a:?} and {b:?} share source {vertex:?}")
            }
            SharedTarget { a, b, vertex } => {
                write!(f, "agents {a:?} and {b:?} share target {vertex:?}")
            }
            UnknownSource { agent, vertex } => {
                write!(f, "agent {agent:?} has unknown source vertex {vertex:?}")
            }
            UnknownTarget { agent, vertex } => {
                write!(f, "agent {agent:?} has unknown target vertex {vertex:?}")
            }
        }
    }
}

/// Checks every instance invariant; the empty list means the instance is valid.
pub fn validate_instance(instance: &Instance) -> Vec<InstanceViolation> {
    let mut out = Vec::new();
    let mut labels = HashMap::new();
    for (pos, spec) in instance.agents.iter().enumerate() {
        if spec.id.index() != pos {
            out.push(InstanceViolation::NonDenseAgentId {
                position: pos,
                id: spec.id,
            });
        }
        if labels.insert(spec.label.clone(), spec.id).is_some() {
            out.push(InstanceViolation::DuplicateAgentLabel {
                label: spec.label.clone(),
            });
        }
        if !instance.graph.contains(spec.source) {
            out.push(InstanceViolation::UnknownSource {
                agent: spec.id,
                vertex: spec.source,
            });
        }
        if !instance.graph.contains(spec.target) {
            out.push(InstanceViolation::UnknownTarget {
                agent: spec.id,
                vertex: spec.target,
            });
        }
    }
    for i in 0..instance.agents.len() {
        for j in (i + 1)..instance.agents.len() {
            let (a, b) = (&instance.agents[i], &instance.agents[j]);
            if a.source == b.source {
                out.push(InstanceViolation::SharedSource {
                    a: a.id,
                    b: b.id,
                    vertex: a.source,
                });
            }
            if a.target == b.target {
                out.push(InstanceViolation::SharedTarget {
                    a: a.id,
                    b: b.id,
                    vertex: a.target,
                });
            }
        }
    }
    out
}

/// Per-agent, turn-indexed vertex sequences of a common length.
///
/// `rows[agent][turn]` is where the agent intends to stand at the end of
/// `turn`; turn 0 is the initial placement. Totality (every agent defined at
/// every turn) is a construction invariant, not a feasibility property.
#[derive(Clone, PartialEq, Eq)]
pub struct Schedule {
    rows: Vec<Vec<VertexId>>,
}

impl Schedule {
    pub fn new(rows: Vec<Vec<VertexId>>) -> Result<Schedule, ModelError> {
        if rows.is_empty() {
            return Err(ModelError::EmptySchedule);
        }
        let len = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(ModelError::EmptyRow(AgentId(i as u32)));
            }
            if row.len() != len {
                return Err(ModelError::RaggedSchedule);
            }
        }
        Ok(Schedule { rows })
    }

    /// Schedule length μ (number of turns after turn 0).
    pub fn length_mu(&self) -> u32 {
        (self.rows[0].len() - 1) as u32
    }

    pub fn agent_count(&self) -> usize {
        self.rows.len()
    }

    pub fn position(&self, agent: AgentId, turn: u32) -> VertexId {
        self.rows[agent.index()][turn as usize]
    }

    pub fn row(&self, agent: AgentId) -> &[VertexId] {
        &self.rows[agent.index()]
    }

    pub fn rows(&self) -> &[Vec<VertexId>] {
        &self.rows
    }

    /// Truncates every row to `turn + 1` entries (turns `0..=turn`).
    pub fn truncated(&self, turn: u32) -> Schedule {
        let rows = self
            .rows
            .iter()
            .map(|r| r[..=(turn as usize).min(r.len() - 1)].to_vec())
            .collect();
        Schedule { rows }
    }
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Schedule({} agents, mu={})",
            self.agent_count(),
            self.length_mu()
        )
    }
}

/// One delay-1 introduction: the agents of `agents` stay put in `turn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayEvent {
    pub turn: u32,
    pub agents: BTreeSet<AgentId>,
    /// Malfunction-1 (adversary-imposed) rather than voluntary delay-1.
    pub forced: bool,
}

impl DelayEvent {
    pub fn voluntary(turn: u32, agents: impl IntoIterator<Item = AgentId>) -> DelayEvent {
        DelayEvent {
            turn,
            agents: agents.into_iter().collect(),
            forced: false,
        }
    }

    pub fn forced(turn: u32, agents: impl IntoIterator<Item = AgentId>) -> DelayEvent {
        DelayEvent {
            turn,
            agents: agents.into_iter().collect(),
            forced: true,
        }
    }
}

/// Max over agents of the source→target hop distance. Any feasible schedule
/// for the instance is at least this long.
pub fn distance_lower_bound(instance: &Instance) -> Result<u32, ModelError> {
    let mut bound = 0;
    for spec in &instance.agents {
        let dist = instance.graph.bfs_distances(spec.source);
        match dist[spec.target.index()] {
            Some(d) => bound = bound.max(d),
            None => return Err(ModelError::UnreachableTarget(spec.id)),
        }
    }
    Ok(bound)
}

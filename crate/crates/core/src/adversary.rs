//! Malfunction plans, tie-break policies, and the exhaustive worst-case
//! adversary.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{
    run, ConflictArbiter, EngineError, Outcome, RunConfig, RunResult, ScriptedArbiter,
};
use crate::model::{AgentId, Instance, Schedule, VertexId};

/// Ordered list of (turn, agent) malfunction-1 events, nondecreasing by turn.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MalfunctionPlan {
    events: Vec<(u32, AgentId)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("malfunction turn {0} must be >= 1")]
    TurnBeforeStart(u32),
    #[error("unknown agent {0:?} in plan")]
    UnknownAgent(AgentId),
    #[error("plan events not sorted nondecreasing by turn ({prev} before {next})")]
    Unsorted { prev: u32, next: u32 },
}

impl MalfunctionPlan {
    pub fn empty() -> MalfunctionPlan {
        MalfunctionPlan { events: Vec::new() }
    }

    /// Validates and adopts a scripted event list.
    pub fn scripted(
        spec: &[(u32, AgentId)],
        instance: &Instance,
    ) -> Result<MalfunctionPlan, PlanError> {
        for &(turn, agent) in spec {
            if turn < 1 {
                return Err(PlanError::TurnBeforeStart(turn));
            }
            if agent.index() >= instance.agent_count() {
                return Err(PlanError::UnknownAgent(agent));
            }
        }
        for pair in spec.windows(2) {
            if pair[1].0 < pair[0].0 {
                return Err(PlanError::Unsorted {
                    prev: pair[0].0,
                    next: pair[1].0,
                });
            }
        }
        Ok(MalfunctionPlan {
            events: spec.to_vec(),
        })
    }

    pub fn events(&self) -> &[(u32, AgentId)] {
        &self.events
    }

    pub fn k(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn last_turn(&self) -> u32 {
        self.events.last().map_or(0, |e| e.0)
    }

    pub fn push(&mut self, turn: u32, agent: AgentId) {
        debug_assert!(turn >= self.last_turn().max(1));
        self.events.push((turn, agent));
    }
}

impl fmt::Display for MalfunctionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.events.is_empty() {
            return write!(f, "-");
        }
        // Raw agent ids; label-aware rendering lives with the file formats.
        let parts: Vec<String> = self
            .events
            .iter()
            .map(|(t, a)| format!("{t}:#{}", a.0))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `k` events with turns uniform in `[1, mu]` and agents uniform over the
/// roster, sorted by turn; reproducible from the seed.
pub fn random_plan(instance: &Instance, schedule: &Schedule, k: usize, seed: u64) -> MalfunctionPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = schedule.length_mu().max(1);
    let mut events: Vec<(u32, AgentId)> = (0..k)
        .map(|_| {
            let turn = rng.gen_range(1..=mu);
            let agent = AgentId(rng.gen_range(0..instance.agent_count() as u32));
            (turn, agent)
        })
        .collect();
    events.sort_by_key(|&(t, a)| (t, a));
    MalfunctionPlan { events }
}

/// Resolves every arbitrary choice in a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum TieBreakPolicy {
    #[default]
    LowestId,
    HighestD,
    SeededRandom(u64),
}

impl fmt::Display for TieBreakPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieBreakPolicy::LowestId => write!(f, "lowest-id"),
            TieBreakPolicy::HighestD => write!(f, "highest-d"),
            TieBreakPolicy::SeededRandom(seed) => write!(f, "seeded-random:{seed}"),
        }
    }
}

impl FromStr for TieBreakPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lowest-id" => Ok(TieBreakPolicy::LowestId),
            "highest-d" => Ok(TieBreakPolicy::HighestD),
            other => {
                if let Some(seed) = other.strip_prefix("seeded-random:") {
                    seed.parse()
                        .map(TieBreakPolicy::SeededRandom)
                        .map_err(|_| format!("bad seed in policy `{other}`"))
                } else if other == "seeded-random" {
                    Ok(TieBreakPolicy::SeededRandom(0))
                } else {
                    Err(format!(
                        "unknown policy `{other}` (expected lowest-id, highest-d, seeded-random[:seed])"
                    ))
                }
            }
        }
    }
}

/// Caps guarding the exhaustive search.
#[derive(Clone, Debug)]
pub struct SearchCaps {
    pub max_mu: u32,
    pub max_agents: usize,
    pub max_k: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_mu: 16,
            max_agents: 10,
            max_k: 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search caps exceeded: {0}")]
    CapsExceeded(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Deadlock ranks strictly worse (for the agents) than any finite makespan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdversaryValue {
    Finite(u32),
    Deadlock,
}

impl AdversaryValue {
    fn rank(self) -> (u8, u32) {
        match self {
            AdversaryValue::Finite(m) => (0, m),
            AdversaryValue::Deadlock => (1, 0),
        }
    }
}

impl PartialOrd for AdversaryValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AdversaryValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for AdversaryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryValue::Finite(m) => write!(f, "{m}"),
            AdversaryValue::Deadlock => write!(f, "deadlock"),
        }
    }
}

fn value_of(result: &RunResult) -> AdversaryValue {
    match result.outcome {
        Outcome::Completed => AdversaryValue::Finite(result.makespan),
        Outcome::Deadlock { .. } => AdversaryValue::Deadlock,
        Outcome::BudgetExhausted { turn } => AdversaryValue::Finite(turn),
    }
}

/// A worst case found by exhaustive search, with its replayable witness.
#[derive(Debug)]
pub struct WorstCase {
    pub plan: MalfunctionPlan,
    pub choices: Vec<((u32, VertexId), AgentId)>,
    pub value: AdversaryValue,
    pub witness: RunResult,
}

/// Enumerates all adaptive plans of at most `k` malfunction-1 events for a
/// deterministic protocol run (the event turn range at each step is
/// `last_turn..=makespan` of the run so far), including the empty plan.
pub fn enumerate_plans(
    instance: &Instance,
    schedule: &Schedule,
    config: &RunConfig,
    k: usize,
) -> Result<Vec<MalfunctionPlan>, EngineError> {
    let mut out = Vec::new();
    let mut stack = vec![MalfunctionPlan::empty()];
    while let Some(plan) = stack.pop() {
        let mut arbiter = ScriptedArbiter::new();
        let result = run(instance, schedule, &plan, config, &mut arbiter)?;
        let reached = match result.outcome {
            Outcome::Completed => result.makespan,
            Outcome::Deadlock { turn } | Outcome::BudgetExhausted { turn } => turn,
        };
        if plan.k() < k {
            for (turn, agent) in extensions(&plan, instance, reached) {
                let mut next = plan.clone();
                next.push(turn, agent);
                stack.push(next);
            }
        }
        out.push(plan);
    }
    out.sort_by(|a, b| a.events.cmp(&b.events));
    out.dedup();
    Ok(out)
}

/// Candidate next events for an adaptive plan: any turn the run stayed alive,
/// never stepping lexicographically backwards at the last event's turn (events
/// within one turn commute, so only one order is enumerated).
fn extensions(
    plan: &MalfunctionPlan,
    instance: &Instance,
    reached: u32,
) -> Vec<(u32, AgentId)> {
    let mut out = Vec::new();
    let last = plan.events().last().copied();
    let from = plan.last_turn().max(1);
    for turn in from..=reached {
        for agent in instance.agent_ids() {
            if let Some((lt, la)) = last {
                if turn == lt && agent < la {
                    continue;
                }
            }
            out.push((turn, agent));
        }
    }
    out
}

/// Exhaustive worst-case search over malfunction placements and, under
/// no-communication, all adversary priority assignments at each contention.
/// Depth-first; the first maximizer in canonical order is kept, so the result
/// is reproducible. Its witness plan replayed through the engine achieves
/// exactly the reported value.
pub fn worst_case_search(
    instance: &Instance,
    schedule: &Schedule,
    config: &RunConfig,
    k: usize,
    caps: &SearchCaps,
) -> Result<WorstCase, SearchError> {
    if schedule.length_mu() > caps.max_mu {
        return Err(SearchError::CapsExceeded(format!(
            "schedule length {} > {}",
            schedule.length_mu(),
            caps.max_mu
        )));
    }
    if instance.agent_count() > caps.max_agents {
        return Err(SearchError::CapsExceeded(format!(
            "{} agents > {}",
            instance.agent_count(),
            caps.max_agents
        )));
    }
    if k > caps.max_k {
        return Err(SearchError::CapsExceeded(format!("k {} > {}", k, caps.max_k)));
    }

    let mut best: Option<WorstCase> = None;
    let mut plans = vec![MalfunctionPlan::empty()];
    let mut seen_plans = std::collections::BTreeSet::new();
    while let Some(plan) = plans.pop() {
        if !seen_plans.insert(plan.events.clone()) {
            continue;
        }
        let reached = explore_choices(
            instance,
            schedule,
            config,
            &plan,
            BTreeMap::new(),
            &mut best,
        )?;
        // Adaptive extension: a later event is legal at any turn the run
        // (under some choice script) was still alive.
        if plan.k() < k {
            if let Some(reached) = reached {
                for (turn, agent) in extensions(&plan, instance, reached) {
                    let mut next = plan.clone();
                    next.push(turn, agent);
                    plans.push(next);
                }
            }
        }
    }
    best.ok_or_else(|| SearchError::CapsExceeded("no run explored".into()))
}

/// Explores every priority script for one plan; returns the maximum turn any
/// explored run stayed alive (None if every script made the plan invalid).
fn explore_choices(
    instance: &Instance,
    schedule: &Schedule,
    config: &RunConfig,
    plan: &MalfunctionPlan,
    script: BTreeMap<(u32, VertexId), AgentId>,
    best: &mut Option<WorstCase>,
) -> Result<Option<u32>, SearchError> {
    let mut arbiter = ProbeArbiter {
        script: script.clone(),
        frontier: None,
    };
    let result = match run(instance, schedule, plan, config, &mut arbiter) {
        Ok(r) => r,
        Err(EngineError::PlanTurnOutOfRange { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut reached = match result.outcome {
        Outcome::Completed => result.makespan,
        Outcome::Deadlock { turn } | Outcome::BudgetExhausted { turn } => turn,
    };
    match arbiter.frontier {
        None => {
            // Fully scripted leaf: candidate worst case.
            let value = value_of(&result);
            let better = match best {
                None => true,
                Some(b) => value > b.value,
            };
            if better {
                *best = Some(WorstCase {
                    plan: plan.clone(),
                    choices: script.into_iter().collect(),
                    value,
                    witness: result,
                });
            }
            Ok(Some(reached))
        }
        Some((turn, vertex, candidates)) => {
            for candidate in candidates {
                let mut extended = script.clone();
                extended.insert((turn, vertex), candidate);
                if let Some(r) =
                    explore_choices(instance, schedule, config, plan, extended, best)?
                {
                    reached = reached.max(r);
                }
            }
            Ok(Some(reached))
        }
    }
}

/// Scripted arbiter that records the first contention it had no script for.
struct ProbeArbiter {
    script: BTreeMap<(u32, VertexId), AgentId>,
    frontier: Option<(u32, VertexId, Vec<AgentId>)>,
}

impl ConflictArbiter for ProbeArbiter {
    fn choose(&mut self, turn: u32, vertex: VertexId, candidates: &[AgentId]) -> AgentId {
        if let Some(&winner) = self.script.get(&(turn, vertex)) {
            if candidates.contains(&winner) {
                return winner;
            }
        }
        if self.frontier.is_none() {
            self.frontier = Some((turn, vertex, candidates.to_vec()));
        }
        candidates[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AgentSpec;
    use crate::model::Graph;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn tiny_instance() -> (Instance, Schedule) {
        let mut g = Graph::new(3);
        g.add_edge(v(0), v(1)).unwrap();
        g.add_edge(v(1), v(2)).unwrap();
        let agents = vec![AgentSpec {
            id: AgentId(0),
            label: "a1".into(),
            source: v(0),
            target: v(2),
        }];
        let schedule = Schedule::new(vec![vec![v(0), v(1), v(2)]]).unwrap();
        (Instance::new(g, agents, 2), schedule)
    }

    #[test]
    fn scripted_plan_validation() {
        let (inst, _) = tiny_instance();
        assert!(MalfunctionPlan::scripted(&[(1, AgentId(0))], &inst).is_ok());
        assert_eq!(
            MalfunctionPlan::scripted(&[(0, AgentId(0))], &inst).unwrap_err(),
            PlanError::TurnBeforeStart(0)
        );
        assert_eq!(
            MalfunctionPlan::scripted(&[(1, AgentId(9))], &inst).unwrap_err(),
            PlanError::UnknownAgent(AgentId(9))
        );
        assert_eq!(
            MalfunctionPlan::scripted(&[(2, AgentId(0)), (1, AgentId(0))], &inst).unwrap_err(),
            PlanError::Unsorted { prev: 2, next: 1 }
        );
    }

    #[test]
    fn random_plan_is_reproducible_and_sorted() {
        let (inst, sched) = tiny_instance();
        let p1 = random_plan(&inst, &sched, 5, 42);
        let p2 = random_plan(&inst, &sched, 5, 42);
        assert_eq!(p1, p2);
        assert_eq!(p1.k(), 5);
        assert!(p1.events().windows(2).all(|w| w[0].0 <= w[1].0));
        assert_eq!(random_plan(&inst, &sched, 0, 7), MalfunctionPlan::empty());
    }

    #[test]
    fn deadlock_outranks_any_finite_makespan() {
        assert!(AdversaryValue::Deadlock > AdversaryValue::Finite(1_000_000));
        assert!(AdversaryValue::Finite(7) > AdversaryValue::Finite(6));
    }

    #[test]
    fn policy_parsing_round_trips() {
        for s in ["lowest-id", "highest-d", "seeded-random:9"] {
            let p: TieBreakPolicy = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("bogus".parse::<TieBreakPolicy>().is_err());
    }
}

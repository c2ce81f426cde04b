//! Turn engine: executes a schedule under malfunction injection with one of
//! four recovery protocols.
//!
//! A turn has three phases. In the decision phase every agent announces the
//! next step of its current (updated) schedule; agents hit by a malfunction
//! announce a forced stay. The modification phase inserts protocol-driven
//! delay-1 operations until the announced moves are consistent. The action
//! phase executes what survived. All inserted delays go through the
//! `apply_delay1` rewrite on the live schedule, so per-agent indices and
//! amortized lengths always match the paper-level fold of delay events.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::adversary::{MalfunctionPlan, TieBreakPolicy};
use crate::model::{
    apply_delay1, check_feasible, AgentId, FeasibilityVerdict, FeasibilityViolation, Instance,
    ModelError, Schedule, VertexId,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    NoComm,
    Cbm,
    Ucbm,
    Ccbm,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Protocol::NoComm => "nocomm",
            Protocol::Cbm => "cbm",
            Protocol::Ucbm => "ucbm",
            Protocol::Ccbm => "ccbm",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nocomm" => Ok(Protocol::NoComm),
            "cbm" => Ok(Protocol::Cbm),
            "ucbm" => Ok(Protocol::Ucbm),
            "ccbm" => Ok(Protocol::Ccbm),
            other => Err(format!(
                "unknown protocol `{other}` (expected nocomm, cbm, ucbm, ccbm)"
            )),
        }
    }
}

/// Intended action announced in the decision phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Intent {
    Move(VertexId),
    Stay,
    /// Adversary-forced stay, consumed in the decision phase of its turn.
    Malfunction,
}

/// Why the modification phase inserted a delay-1 for an agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayReason {
    UnhealthyTarget,
    PriorityLoss,
    TieBreak,
}

impl fmt::Display for DelayReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DelayReason::UnhealthyTarget => "unhealthy-target",
            DelayReason::PriorityLoss => "priority-loss",
            DelayReason::TieBreak => "tie-break",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Move(VertexId),
    Stay,
}

/// One adversary priority decision under no-communication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceRecord {
    pub turn: u32,
    pub vertex: VertexId,
    pub candidates: Vec<AgentId>,
    pub chosen: AgentId,
}

/// Everything that happened in one turn, in phase order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnRecord {
    pub turn: u32,
    pub decisions: Vec<(AgentId, Intent)>,
    pub choices: Vec<ChoiceRecord>,
    pub modifications: Vec<(AgentId, DelayReason)>,
    pub actions: Vec<(AgentId, Action)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    Deadlock { turn: u32 },
    BudgetExhausted { turn: u32 },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Completed => write!(f, "completed"),
            Outcome::Deadlock { turn } => write!(f, "deadlock {turn}"),
            Outcome::BudgetExhausted { turn } => write!(f, "budget-exhausted {turn}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub outcome: Outcome,
    /// Length of the executed (amortized) schedule.
    pub makespan: u32,
    pub final_schedule: Schedule,
    pub trace: Vec<TurnRecord>,
    /// Delay-1 operations performed per agent (malfunctions included).
    pub delay_counts: Vec<u32>,
    /// CCBM only: runtime vertex counters after each executed turn.
    pub counter_log: Option<Vec<Vec<u32>>>,
}

impl RunResult {
    /// First turn from which the agent rests on its final position.
    pub fn arrival_turn(&self, agent: AgentId) -> u32 {
        let row = self.final_schedule.row(agent);
        let last = *row.last().expect("rows are nonempty");
        let mut turn = row.len() - 1;
        while turn > 0 && row[turn - 1] == last {
            turn -= 1;
        }
        turn as u32
    }
}

/// Resolves no-communication contentions: which of the candidates enters.
pub trait ConflictArbiter {
    fn choose(&mut self, turn: u32, vertex: VertexId, candidates: &[AgentId]) -> AgentId;
}

/// Pinned winners per (turn, vertex); unscripted contentions fall back to the
/// lowest agent id.
#[derive(Clone, Debug, Default)]
pub struct ScriptedArbiter {
    script: BTreeMap<(u32, VertexId), AgentId>,
}

impl ScriptedArbiter {
    pub fn new() -> ScriptedArbiter {
        ScriptedArbiter::default()
    }

    pub fn with_script(entries: impl IntoIterator<Item = ((u32, VertexId), AgentId)>) -> Self {
        ScriptedArbiter {
            script: entries.into_iter().collect(),
        }
    }

    pub fn pin(&mut self, turn: u32, vertex: VertexId, winner: AgentId) {
        self.script.insert((turn, vertex), winner);
    }
}

impl ConflictArbiter for ScriptedArbiter {
    fn choose(&mut self, turn: u32, vertex: VertexId, candidates: &[AgentId]) -> AgentId {
        if let Some(&winner) = self.script.get(&(turn, vertex)) {
            if candidates.contains(&winner) {
                return winner;
            }
        }
        candidates[0]
    }
}

/// Draws the winner of an arbitrary choice under the configured policy.
pub struct TieBreaker {
    policy: TieBreakPolicy,
    rng: Option<ChaCha8Rng>,
}

impl TieBreaker {
    pub fn new(policy: TieBreakPolicy) -> TieBreaker {
        let rng = match policy {
            TieBreakPolicy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        TieBreaker { policy, rng }
    }

    /// Picks a winner among `candidates` (sorted ascending by id).
    pub fn pick(&mut self, candidates: &[AgentId], d_of: impl Fn(AgentId) -> u32) -> AgentId {
        debug_assert!(!candidates.is_empty());
        match &self.policy {
            TieBreakPolicy::LowestId => candidates[0],
            TieBreakPolicy::HighestD => *candidates
                .iter()
                .max_by_key(|&&a| (d_of(a), std::cmp::Reverse(a)))
                .expect("nonempty"),
            TieBreakPolicy::SeededRandom(_) => {
                let rng = self.rng.as_mut().expect("seeded rng");
                candidates[rng.gen_range(0..candidates.len())]
            }
        }
    }
}

/// UCBM contention rule: the smaller accumulated delay count wins; equal
/// counts go to the tie-break policy.
pub fn ucbm_priority(
    a: AgentId,
    d_a: u32,
    b: AgentId,
    d_b: u32,
    breaker: &mut TieBreaker,
) -> AgentId {
    if d_a < d_b {
        a
    } else if d_b < d_a {
        b
    } else {
        let mut pair = [a, b];
        pair.sort();
        breaker.pick(&pair, |x| if x == a { d_a } else { d_b })
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub protocol: Protocol,
    pub policy: TieBreakPolicy,
    /// Turn budget; defaults to `mu + k + 2|V|`.
    pub budget: Option<u32>,
    /// How many recent states the repetition detector keeps.
    pub deadlock_window: usize,
}

impl RunConfig {
    pub fn new(protocol: Protocol) -> RunConfig {
        RunConfig {
            protocol,
            policy: TieBreakPolicy::LowestId,
            budget: None,
            deadlock_window: 64,
        }
    }

    pub fn with_policy(mut self, policy: TieBreakPolicy) -> RunConfig {
        self.policy = policy;
        self
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("input schedule is infeasible: {0}")]
    InfeasibleInput(FeasibilityViolation),
    #[error("plan names unknown agent {0:?}")]
    PlanAgentUnknown(AgentId),
    #[error("plan turn {turn} lies beyond the live schedule (run ended at {reached})")]
    PlanTurnOutOfRange { turn: u32, reached: u32 },
    #[error("runtime integrity violation: {0}")]
    Integrity(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Expected-count lists for CCBM: replays the schedule counting occupation
/// spells per vertex (initial placement counts one spell, staying does not
/// re-count, re-entry counts) and records for each agent and step the spell
/// count of its scheduled vertex at that turn, own spell included.
pub fn ccbm_expected_counts(instance: &Instance, schedule: &Schedule) -> Vec<Vec<u32>> {
    let mut counters = vec![0u32; instance.graph.vertex_count()];
    let agents = schedule.agent_count();
    let mu = schedule.length_mu();
    let mut lists: Vec<Vec<u32>> = vec![Vec::with_capacity(mu as usize + 1); agents];
    for a in 0..agents {
        counters[schedule.rows()[a][0].index()] += 1;
    }
    for (a, list) in lists.iter_mut().enumerate() {
        list.push(counters[schedule.rows()[a][0].index()]);
    }
    for turn in 1..=mu as usize {
        for a in 0..agents {
            let row = &schedule.rows()[a];
            if row[turn] != row[turn - 1] {
                counters[row[turn].index()] += 1;
            }
        }
        for (a, list) in lists.iter_mut().enumerate() {
            list.push(counters[schedule.rows()[a][turn].index()]);
        }
    }
    lists
}

pub fn default_budget(mu: u32, k: usize, vertex_count: usize) -> u32 {
    mu + k as u32 + 2 * vertex_count as u32
}

/// State snapshot used by the repetition detector. Only protocol-relevant
/// fields enter the key, so bookkeeping growth does not mask true repeats.
#[derive(Clone, PartialEq, Eq)]
struct StateKey {
    suffixes: Vec<Vec<VertexId>>,
    delayed: Option<Vec<bool>>,
    d: Option<Vec<u32>>,
    counters: Option<Vec<u32>>,
    pending_events: usize,
}

/// Executes `schedule` under `plan`. The input schedule must be feasible;
/// the result carries the executed schedule, a replayable trace, and the
/// outcome (completion, detected deadlock, or exhausted budget).
pub fn run(
    instance: &Instance,
    schedule: &Schedule,
    plan: &MalfunctionPlan,
    config: &RunConfig,
    arbiter: &mut dyn ConflictArbiter,
) -> Result<RunResult, EngineError> {
    match check_feasible(instance, schedule)? {
        FeasibilityVerdict::Feasible => {}
        FeasibilityVerdict::Violation(v) => return Err(EngineError::InfeasibleInput(v)),
    }
    for &(_, agent) in plan.events() {
        if agent.index() >= instance.agent_count() {
            return Err(EngineError::PlanAgentUnknown(agent));
        }
    }

    let agents = instance.agent_count();
    let mu0 = schedule.length_mu();
    let budget = config
        .budget
        .unwrap_or_else(|| default_budget(mu0, plan.k(), instance.graph.vertex_count()));

    let mut events_by_turn: BTreeMap<u32, Vec<AgentId>> = BTreeMap::new();
    for &(turn, agent) in plan.events() {
        events_by_turn.entry(turn).or_default().push(agent);
    }
    let mut pending_events = plan.k();

    let mut live = schedule.clone();
    let ccbm = config.protocol == Protocol::Ccbm;
    let mut expected: Option<Vec<Vec<u32>>> =
        ccbm.then(|| ccbm_expected_counts(instance, schedule));
    let mut counters = vec![0u32; instance.graph.vertex_count()];
    for a in 0..agents {
        counters[live.rows()[a][0].index()] += 1;
    }
    let mut counter_log: Option<Vec<Vec<u32>>> = ccbm.then(Vec::new);

    let mut delayed_state = vec![false; agents];
    let mut d = vec![0u32; agents];
    let mut breaker = TieBreaker::new(config.policy.clone());

    let mut trace: Vec<TurnRecord> = Vec::new();
    let mut stall = 0usize;
    // Stillness caused by forced malfunctions (an agent hit f times in turn t
    // sits through turn t+f-1) must not look like a livelock.
    let mut forced_still_until: u32 = 0;
    let mut recent: VecDeque<StateKey> = VecDeque::new();

    let mut turn: u32 = 1;
    let outcome = loop {
        if turn > live.length_mu() {
            break Outcome::Completed;
        }
        if turn > budget {
            break Outcome::BudgetExhausted { turn: turn - 1 };
        }
        let t = turn as usize;

        // Decision phase.
        let forced: Vec<u32> = {
            let mut counts = vec![0u32; agents];
            if let Some(list) = events_by_turn.remove(&turn) {
                for agent in list {
                    counts[agent.index()] += 1;
                    pending_events -= 1;
                }
            }
            if let Some(&most) = counts.iter().max() {
                if most > 0 {
                    forced_still_until = forced_still_until.max(turn + most - 1);
                }
            }
            counts
        };
        let mut intents: Vec<Intent> = Vec::with_capacity(agents);
        for a in 0..agents {
            let row = live.row(AgentId(a as u32));
            let intent = if forced[a] > 0 {
                delayed_state[a] = true;
                Intent::Malfunction
            } else if row[t] != row[t - 1] {
                Intent::Move(row[t])
            } else {
                Intent::Stay
            };
            intents.push(intent);
        }
        let decisions: Vec<(AgentId, Intent)> = intents
            .iter()
            .enumerate()
            .map(|(a, &i)| (AgentId(a as u32), i))
            .collect();

        // Modification phase.
        let mut wants_move: Vec<Option<VertexId>> = intents
            .iter()
            .map(|i| match i {
                Intent::Move(v) => Some(*v),
                _ => None,
            })
            .collect();
        let mut occupant: HashMap<VertexId, usize> = HashMap::new();
        for a in 0..agents {
            occupant.insert(live.rows()[a][t - 1], a);
        }
        let position = |a: usize| live.rows()[a][t - 1];

        let mut modifications: Vec<(AgentId, DelayReason)> = Vec::new();
        let mut choices: Vec<ChoiceRecord> = Vec::new();

        if let Some(expected) = &expected {
            // CCBM: move only when the agent would become exactly the
            // expected-numbered visitor of its next vertex.
            for a in 0..agents {
                if let Some(target) = wants_move[a] {
                    let want = expected[a][t];
                    if counters[target.index()] + 1 != want {
                        if counters[target.index()] >= want {
                            return Err(EngineError::Integrity(format!(
                                "counter of {target:?} already at {} >= expected {want} for agent a{a}",
                                counters[target.index()]
                            )));
                        }
                        wants_move[a] = None;
                        delayed_state[a] = true;
                        modifications.push((AgentId(a as u32), DelayReason::UnhealthyTarget));
                    }
                }
            }
        }

        loop {
            let mut changed = false;

            // Head-on swap attempts block both agents.
            for a in 0..agents {
                let Some(target) = wants_move[a] else { continue };
                let Some(&o) = occupant.get(&target) else { continue };
                if o == a {
                    continue;
                }
                if wants_move[o] == Some(position(a)) {
                    for x in [a, o] {
                        wants_move[x] = None;
                        delayed_state[x] = true;
                        modifications.push((AgentId(x as u32), DelayReason::UnhealthyTarget));
                    }
                    changed = true;
                }
            }

            // Group entrants by target vertex.
            let mut entrants: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
            for (a, target) in wants_move.iter().enumerate() {
                if let Some(target) = target {
                    entrants.entry(*target).or_default().push(a);
                }
            }

            for (&vertex, group) in &entrants {
                let blocked = occupant
                    .get(&vertex)
                    .is_some_and(|&o| wants_move[o].is_none());
                if blocked {
                    // Not vacated this turn: nobody may enter.
                    for &a in group {
                        wants_move[a] = None;
                        delayed_state[a] = true;
                        modifications.push((AgentId(a as u32), DelayReason::UnhealthyTarget));
                    }
                    changed = true;
                    continue;
                }
                if group.len() < 2 {
                    continue;
                }
                let ids: Vec<AgentId> = group.iter().map(|&a| AgentId(a as u32)).collect();
                let resolved: Vec<(usize, DelayReason)> = match config.protocol {
                    Protocol::NoComm => {
                        let winner = arbiter.choose(turn, vertex, &ids);
                        choices.push(ChoiceRecord {
                            turn,
                            vertex,
                            candidates: ids.clone(),
                            chosen: winner,
                        });
                        group
                            .iter()
                            .filter(|&&a| AgentId(a as u32) != winner)
                            .map(|&a| (a, DelayReason::PriorityLoss))
                            .collect()
                    }
                    Protocol::Cbm => {
                        let delayed: Vec<AgentId> = ids
                            .iter()
                            .copied()
                            .filter(|a| delayed_state[a.index()])
                            .collect();
                        match delayed.len() {
                            // Contested target is unhealthy for every
                            // on-time agent: all of them delay.
                            0 => group
                                .iter()
                                .map(|&a| (a, DelayReason::UnhealthyTarget))
                                .collect(),
                            1 => {
                                let winner = delayed[0];
                                group
                                    .iter()
                                    .filter(|&&a| AgentId(a as u32) != winner)
                                    .map(|&a| (a, DelayReason::UnhealthyTarget))
                                    .collect()
                            }
                            _ => {
                                let winner = breaker.pick(&delayed, |x| d[x.index()]);
                                group
                                    .iter()
                                    .filter(|&&a| AgentId(a as u32) != winner)
                                    .map(|&a| {
                                        let reason = if delayed_state[a] {
                                            DelayReason::TieBreak
                                        } else {
                                            DelayReason::UnhealthyTarget
                                        };
                                        (a, reason)
                                    })
                                    .collect()
                            }
                        }
                    }
                    Protocol::Ucbm => {
                        let min_d = ids.iter().map(|a| d[a.index()]).min().expect("nonempty");
                        let lowest: Vec<AgentId> = ids
                            .iter()
                            .copied()
                            .filter(|a| d[a.index()] == min_d)
                            .collect();
                        let winner = breaker.pick(&lowest, |x| d[x.index()]);
                        group
                            .iter()
                            .filter(|&&a| AgentId(a as u32) != winner)
                            .map(|&a| {
                                let reason = if d[a] == min_d {
                                    DelayReason::TieBreak
                                } else {
                                    DelayReason::PriorityLoss
                                };
                                (a, reason)
                            })
                            .collect()
                    }
                    Protocol::Ccbm => {
                        return Err(EngineError::Integrity(format!(
                            "two agents passed the counter check for {vertex:?} in turn {turn}"
                        )));
                    }
                };
                if !resolved.is_empty() {
                    for (a, reason) in resolved {
                        wants_move[a] = None;
                        delayed_state[a] = true;
                        modifications.push((AgentId(a as u32), reason));
                    }
                    changed = true;
                }
            }

            if !changed {
                break;
            }
        }
        modifications.sort_by_key(|&(a, _)| a);

        // Apply all of this turn's delay-1 operations to the live schedule.
        let mut delaying: BTreeSet<AgentId> = BTreeSet::new();
        for a in 0..agents {
            if forced[a] > 0 || modifications.iter().any(|&(m, _)| m.index() == a) {
                delaying.insert(AgentId(a as u32));
                d[a] += forced[a].max(1);
            }
        }
        if !delaying.is_empty() {
            live = apply_delayed(live, &mut expected, &delaying, turn)?;
            // Extra forced stays for agents malfunctioning more than once in
            // one turn: each occurrence is its own delay-1.
            for (a, &count) in forced.iter().enumerate() {
                for _ in 1..count {
                    let one: BTreeSet<AgentId> = [AgentId(a as u32)].into();
                    live = apply_delayed(live, &mut expected, &one, turn)?;
                }
            }
        }

        // Action phase: execute the surviving schedule column.
        let mut actions: Vec<(AgentId, Action)> = Vec::with_capacity(agents);
        let mut moved_any = false;
        let mut seen: HashMap<VertexId, AgentId> = HashMap::new();
        for a in 0..agents {
            let id = AgentId(a as u32);
            let from = live.rows()[a][t - 1];
            let to = live.rows()[a][t];
            if let Some(&other) = seen.get(&to) {
                return Err(EngineError::Integrity(format!(
                    "turn {turn}: agents {other:?} and {id:?} both enter {to:?}"
                )));
            }
            seen.insert(to, id);
            if to != from {
                moved_any = true;
                if ccbm {
                    counters[to.index()] += 1;
                }
                actions.push((id, Action::Move(to)));
            } else {
                actions.push((id, Action::Stay));
            }
        }
        if let Some(log) = &mut counter_log {
            log.push(counters.clone());
        }
        trace.push(TurnRecord {
            turn,
            decisions,
            choices,
            modifications,
            actions,
        });

        // Deadlock detection: repetition of the full simulation state, or no
        // movement for |A|+1 consecutive turns while somebody is off-target.
        let off_target = (0..agents)
            .any(|a| live.rows()[a][t] != instance.agents[a].target);
        let still_forced = turn <= forced_still_until;
        stall = if !moved_any && off_target && !still_forced {
            stall + 1
        } else {
            0
        };
        if pending_events == 0 && stall > agents {
            break Outcome::Deadlock { turn };
        }
        let key = StateKey {
            suffixes: (0..agents).map(|a| live.rows()[a][t..].to_vec()).collect(),
            delayed: matches!(config.protocol, Protocol::Cbm).then(|| delayed_state.clone()),
            d: matches!(config.protocol, Protocol::Ucbm).then(|| d.clone()),
            counters: ccbm.then(|| counters.clone()),
            pending_events,
        };
        if pending_events == 0 && recent.contains(&key) {
            break Outcome::Deadlock { turn };
        }
        recent.push_back(key);
        if recent.len() > config.deadlock_window {
            recent.pop_front();
        }

        turn += 1;
    };

    let executed_through = match outcome {
        Outcome::Completed => live.length_mu(),
        Outcome::Deadlock { turn } | Outcome::BudgetExhausted { turn } => turn,
    };
    let final_schedule = live.truncated(executed_through);
    if pending_events > 0 {
        let next = *events_by_turn.keys().next().expect("pending events exist");
        return Err(EngineError::PlanTurnOutOfRange {
            turn: next,
            reached: executed_through,
        });
    }
    if outcome == Outcome::Completed {
        match check_feasible(instance, &final_schedule)? {
            FeasibilityVerdict::Feasible => {}
            FeasibilityVerdict::Violation(v) => {
                return Err(EngineError::Integrity(format!(
                    "completed run produced an infeasible schedule: {v}"
                )));
            }
        }
    }
    Ok(RunResult {
        outcome,
        makespan: executed_through,
        final_schedule,
        trace,
        delay_counts: d,
        counter_log,
    })
}

/// apply_delay1 on the live schedule, mirrored onto the CCBM expected lists.
fn apply_delayed(
    live: Schedule,
    expected: &mut Option<Vec<Vec<u32>>>,
    delaying: &BTreeSet<AgentId>,
    turn: u32,
) -> Result<Schedule, EngineError> {
    let old_len = live.length_mu();
    let next = apply_delay1(&live, delaying, turn)?;
    if let Some(lists) = expected {
        let t = turn as usize;
        let pruned = next.length_mu() == old_len;
        for (a, list) in lists.iter_mut().enumerate() {
            if delaying.contains(&AgentId(a as u32)) {
                list.insert(t, list[t - 1]);
                if pruned {
                    list.truncate(old_len as usize + 1);
                }
            } else if !pruned {
                let last = *list.last().expect("nonempty");
                list.push(last);
            }
        }
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentSpec, Graph};

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn fig1_like() -> (Instance, Schedule) {
        let mut g = Graph::with_labels(vec!["u1".into(), "u2".into(), "u3".into(), "u4".into()])
            .unwrap();
        g.add_edge(v(0), v(1)).unwrap();
        g.add_edge(v(1), v(2)).unwrap();
        g.add_edge(v(1), v(3)).unwrap();
        let agents = vec![
            AgentSpec { id: AgentId(0), label: "a1".into(), source: v(0), target: v(1) },
            AgentSpec { id: AgentId(1), label: "a2".into(), source: v(3), target: v(2) },
        ];
        let inst = Instance::new(g, agents, 2);
        let sched = Schedule::new(vec![vec![v(0), v(0), v(1)], vec![v(3), v(1), v(2)]]).unwrap();
        (inst, sched)
    }

    fn run_with(
        inst: &Instance,
        sched: &Schedule,
        plan: &[(u32, AgentId)],
        protocol: Protocol,
    ) -> RunResult {
        let plan = MalfunctionPlan::scripted(plan, inst).unwrap();
        let config = RunConfig::new(protocol);
        let mut arbiter = ScriptedArbiter::new();
        run(inst, sched, &plan, &config, &mut arbiter).unwrap()
    }

    #[test]
    fn empty_plan_reproduces_the_input_schedule() {
        let (inst, sched) = fig1_like();
        for protocol in [Protocol::NoComm, Protocol::Cbm, Protocol::Ucbm, Protocol::Ccbm] {
            let result = run_with(&inst, &sched, &[], protocol);
            assert_eq!(result.outcome, Outcome::Completed);
            assert_eq!(result.makespan, 2);
            assert_eq!(result.final_schedule, sched, "{protocol}");
        }
    }

    #[test]
    fn cbm_handles_the_single_malfunction_with_one_extra_turn() {
        let (inst, sched) = fig1_like();
        let result = run_with(&inst, &sched, &[(1, AgentId(1))], Protocol::Cbm);
        assert_eq!(result.outcome, Outcome::Completed);
        assert_eq!(result.makespan, 3);
        // a1 was delayed once by the modification phase, a2 by the adversary.
        assert_eq!(result.delay_counts, vec![1, 1]);
        assert_eq!(result.final_schedule.row(AgentId(0)), &[v(0), v(0), v(0), v(1)]);
        assert_eq!(result.final_schedule.row(AgentId(1)), &[v(3), v(3), v(1), v(2)]);
        let turn2 = &result.trace[1];
        assert_eq!(
            turn2.modifications,
            vec![(AgentId(0), DelayReason::UnhealthyTarget)]
        );
    }

    #[test]
    fn nocomm_with_default_arbiter_deadlocks_on_the_catastrophe() {
        let (inst, sched) = fig1_like();
        let result = run_with(&inst, &sched, &[(1, AgentId(1))], Protocol::NoComm);
        match result.outcome {
            Outcome::Deadlock { turn } => assert!(turn <= 6, "deadlock at {turn}"),
            other => panic!("expected deadlock, got {other:?}"),
        }
    }

    #[test]
    fn nocomm_with_a2_prioritized_survives() {
        let (inst, sched) = fig1_like();
        let plan = MalfunctionPlan::scripted(&[(1, AgentId(1))], &inst).unwrap();
        let config = RunConfig::new(Protocol::NoComm);
        let mut arbiter = ScriptedArbiter::with_script([((2, v(1)), AgentId(1))]);
        let result = run(&inst, &sched, &plan, &config, &mut arbiter).unwrap();
        assert_eq!(result.outcome, Outcome::Completed);
        assert_eq!(result.makespan, 3);
        assert_eq!(result.trace[1].choices.len(), 1);
        assert_eq!(result.trace[1].choices[0].chosen, AgentId(1));
    }

    #[test]
    fn ucbm_gives_priority_to_the_smaller_delay_count() {
        let mut breaker = TieBreaker::new(TieBreakPolicy::LowestId);
        assert_eq!(ucbm_priority(AgentId(0), 0, AgentId(1), 2, &mut breaker), AgentId(0));
        assert_eq!(ucbm_priority(AgentId(0), 3, AgentId(1), 1, &mut breaker), AgentId(1));
        assert_eq!(ucbm_priority(AgentId(0), 1, AgentId(1), 1, &mut breaker), AgentId(0));
        let mut high = TieBreaker::new(TieBreakPolicy::HighestD);
        assert_eq!(high.pick(&[AgentId(0), AgentId(1)], |a| a.0), AgentId(1));
    }

    #[test]
    fn ccbm_expected_counts_match_the_fig1_replay() {
        let (inst, sched) = fig1_like();
        let lists = ccbm_expected_counts(&inst, &sched);
        assert_eq!(lists[0], vec![1, 1, 2]); // a1 is the second visitor of u2
        assert_eq!(lists[1], vec![1, 1, 1]); // a2 is the first
    }

    #[test]
    fn ccbm_waits_for_the_counter_and_completes() {
        let (inst, sched) = fig1_like();
        let result = run_with(&inst, &sched, &[(1, AgentId(1))], Protocol::Ccbm);
        assert_eq!(result.outcome, Outcome::Completed);
        assert_eq!(result.makespan, 3);
        // Turn 2: a1 must wait (counter of u2 still 0), a2 enters.
        let turn2 = &result.trace[1];
        assert_eq!(
            turn2.modifications,
            vec![(AgentId(0), DelayReason::UnhealthyTarget)]
        );
        let log = result.counter_log.as_ref().unwrap();
        // After turn 2, u2 has seen its first spell.
        assert_eq!(log[1][v(1).index()], 1);
        // After turn 3, both visits happened.
        assert_eq!(log[2][v(1).index()], 2);
    }

    #[test]
    fn infeasible_input_is_rejected_up_front() {
        let (inst, _) = fig1_like();
        let bad = Schedule::new(vec![vec![v(0), v(1), v(1)], vec![v(3), v(1), v(2)]]).unwrap();
        let plan = MalfunctionPlan::empty();
        let config = RunConfig::new(Protocol::Cbm);
        let mut arbiter = ScriptedArbiter::new();
        match run(&inst, &bad, &plan, &config, &mut arbiter) {
            Err(EngineError::InfeasibleInput(_)) => {}
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn plan_beyond_the_live_schedule_is_an_error() {
        let (inst, sched) = fig1_like();
        let plan = MalfunctionPlan::scripted(&[(9, AgentId(0))], &inst).unwrap();
        let config = RunConfig::new(Protocol::Cbm);
        let mut arbiter = ScriptedArbiter::new();
        match run(&inst, &sched, &plan, &config, &mut arbiter) {
            Err(EngineError::PlanTurnOutOfRange { turn: 9, .. }) => {}
            other => panic!("expected out-of-range error, got {other:?}"),
        }
    }

    #[test]
    fn malfunction_on_parked_agent_is_a_noop_under_amortization() {
        let mut g = Graph::new(3);
        g.add_edge(v(0), v(1)).unwrap();
        g.add_edge(v(1), v(2)).unwrap();
        let agents = vec![
            AgentSpec { id: AgentId(0), label: "a1".into(), source: v(0), target: v(0) },
            AgentSpec { id: AgentId(1), label: "a2".into(), source: v(1), target: v(2) },
        ];
        let inst = Instance::new(g, agents, 1);
        let sched = Schedule::new(vec![vec![v(0), v(0)], vec![v(1), v(2)]]).unwrap();
        let result = run_with(&inst, &sched, &[(1, AgentId(0))], Protocol::Cbm);
        assert_eq!(result.outcome, Outcome::Completed);
        assert_eq!(result.makespan, 1);
        assert_eq!(result.delay_counts, vec![1, 0]);
    }

    #[test]
    fn two_delayed_entrants_resolved_by_policy_either_way() {
        // Star: x1-c, x2-c, c-y1, c-y2. a2 crosses c first in the schedule.
        let mut g = Graph::with_labels(
            ["x1", "x2", "c", "y1", "y2"].map(String::from).to_vec(),
        )
        .unwrap();
        g.add_edge(v(0), v(2)).unwrap();
        g.add_edge(v(1), v(2)).unwrap();
        g.add_edge(v(2), v(3)).unwrap();
        g.add_edge(v(2), v(4)).unwrap();
        let agents = vec![
            AgentSpec { id: AgentId(0), label: "a1".into(), source: v(0), target: v(3) },
            AgentSpec { id: AgentId(1), label: "a2".into(), source: v(1), target: v(4) },
        ];
        let inst = Instance::new(g, agents, 3);
        let sched = Schedule::new(vec![
            vec![v(0), v(0), v(2), v(3)],
            vec![v(1), v(2), v(4), v(4)],
        ])
        .unwrap();
        // a2 malfunctions twice, a1 once: both delayed, both reach for c in
        // turn 3. Rule 2(c): the policy picks the mover.
        let plan = &[(1, AgentId(0)), (1, AgentId(1)), (1, AgentId(1))];
        for policy in [TieBreakPolicy::LowestId, TieBreakPolicy::HighestD] {
            let p = MalfunctionPlan::scripted(plan, &inst).unwrap();
            let config = RunConfig::new(Protocol::Cbm).with_policy(policy.clone());
            let mut arbiter = ScriptedArbiter::new();
            let result = run(&inst, &sched, &p, &config, &mut arbiter).unwrap();
            assert_eq!(result.outcome, Outcome::Completed, "policy {policy:?}");
        }
    }
}

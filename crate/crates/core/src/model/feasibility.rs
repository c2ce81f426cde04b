//! Feasibility: per-turn injectivity, stay-or-neighbor moves, no swaps,
//! correct endpoints.

use std::collections::HashMap;
use std::fmt;

use super::{AgentId, Instance, ModelError, Schedule, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityVerdict {
    Feasible,
    Violation(FeasibilityViolation),
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityVerdict::Feasible)
    }
}

/// First rule broken by a schedule, with the turn, agents and vertices involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityViolation {
    WrongSource { agent: AgentId, expected: VertexId, found: VertexId },
    UnknownVertex { agent: AgentId, turn: u32, vertex: VertexId },
    VertexCollision { turn: u32, first: AgentId, second: AgentId, vertex: VertexId },
    IllegalMove { turn: u32, agent: AgentId, from: VertexId, to: VertexId },
    Swap { turn: u32, first: AgentId, second: AgentId, from: VertexId, to: VertexId },
    TargetMissed { agent: AgentId, expected: VertexId, found: VertexId },
}

impl fmt::Display for FeasibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FeasibilityViolation::*;
        match self {
            WrongSource { agent, expected, found } => write!(
                f,
                "agent {agent:?} starts at {found:?} instead of its source {expected:?}"
            ),
            UnknownVertex { agent, turn, vertex } => {
                write!(f, "turn {turn}: agent {agent:?} placed on unknown vertex {vertex:?}")
            }
            VertexCollision { turn, first, second, vertex } => write!(
                f,
                "turn {turn}: agents {first:?} and {second:?} both occupy {vertex:?}"
            ),
            IllegalMove { turn, agent, from, to } => write!(
                f,
                "turn {turn}: agent {agent:?} jumps {from:?} -> {to:?} (not stay-or-neighbor)"
            ),
            Swap { turn, first, second, from, to } => write!(
                f,
                "turn {turn}: agents {first:?} and {second:?} swap across {from:?}-{to:?}"
            ),
            TargetMissed { agent, expected, found } => write!(
                f,
                "agent {agent:?} ends at {found:?} instead of its target {expected:?}"
            ),
        }
    }
}

/// Checks a total schedule against the motion rules. Returns the first
/// violation in scan order: turn 0 placement, then per turn injectivity,
/// stay-or-neighbor moves and swaps, and finally the turn-μ targets.
pub fn check_feasible(
    instance: &Instance,
    schedule: &Schedule,
) -> Result<FeasibilityVerdict, ModelError> {
    if schedule.agent_count() != instance.agent_count() {
        return Err(ModelError::AgentCountMismatch {
            expected: instance.agent_count(),
            found: schedule.agent_count(),
        });
    }
    let mu = schedule.length_mu();
    let violation = scan(instance, schedule, mu);
    Ok(match violation {
        Some(v) => FeasibilityVerdict::Violation(v),
        None => FeasibilityVerdict::Feasible,
    })
}

fn scan(instance: &Instance, schedule: &Schedule, mu: u32) -> Option<FeasibilityViolation> {
    for spec in &instance.agents {
        let found = schedule.position(spec.id, 0);
        if found != spec.source {
            return Some(FeasibilityViolation::WrongSource {
                agent: spec.id,
                expected: spec.source,
                found,
            });
        }
    }
    for turn in 0..=mu {
        if let Some(v) = check_turn(instance, schedule, turn) {
            return Some(v);
        }
    }
    for spec in &instance.agents {
        let found = schedule.position(spec.id, mu);
        if found != spec.target {
            return Some(FeasibilityViolation::TargetMissed {
                agent: spec.id,
                expected: spec.target,
                found,
            });
        }
    }
    None
}

fn check_turn(instance: &Instance, schedule: &Schedule, turn: u32) -> Option<FeasibilityViolation> {
    let mut occupied: HashMap<VertexId, AgentId> = HashMap::new();
    for id in instance.agent_ids() {
        let pos = schedule.position(id, turn);
        if !instance.graph.contains(pos) {
            return Some(FeasibilityViolation::UnknownVertex { agent: id, turn, vertex: pos });
        }
        if let Some(&other) = occupied.get(&pos) {
            return Some(FeasibilityViolation::VertexCollision {
                turn,
                first: other,
                second: id,
                vertex: pos,
            });
        }
        occupied.insert(pos, id);
    }
    if turn == 0 {
        return None;
    }
    for id in instance.agent_ids() {
        let from = schedule.position(id, turn - 1);
        let to = schedule.position(id, turn);
        if from != to && !instance.graph.has_edge(from, to) {
            return Some(FeasibilityViolation::IllegalMove { turn, agent: id, from, to });
        }
    }
    for i in 0..instance.agent_count() {
        for j in (i + 1)..instance.agent_count() {
            let (a, b) = (AgentId(i as u32), AgentId(j as u32));
            let (a_from, a_to) = (schedule.position(a, turn - 1), schedule.position(a, turn));
            let (b_from, b_to) = (schedule.position(b, turn - 1), schedule.position(b, turn));
            if a_from != a_to && a_to == b_from && b_to == a_from {
                return Some(FeasibilityViolation::Swap {
                    turn,
                    first: a,
                    second: b,
                    from: a_from,
                    to: a_to,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentSpec, Graph};

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    // Fig. 1: vertices u1..u4 -> 0..3, edges u1u2, u2u3, u2u4.
    fn fig1() -> Instance {
        let mut g = Graph::with_labels(vec!["u1".into(), "u2".into(), "u3".into(), "u4".into()])
            .unwrap();
        g.add_edge(v(0), v(1)).unwrap();
        g.add_edge(v(1), v(2)).unwrap();
        g.add_edge(v(1), v(3)).unwrap();
        let agents = vec![
            AgentSpec { id: AgentId(0), label: "a1".into(), source: v(0), target: v(1) },
            AgentSpec { id: AgentId(1), label: "a2".into(), source: v(3), target: v(2) },
        ];
        Instance::new(g, agents, 2)
    }

    #[test]
    fn fig1_optimum_is_feasible() {
        let sched = Schedule::new(vec![vec![v(0), v(0), v(1)], vec![v(3), v(1), v(2)]]).unwrap();
        assert_eq!(check_feasible(&fig1(), &sched), Ok(FeasibilityVerdict::Feasible));
    }

    #[test]
    fn zero_length_schedule_with_parked_agents_is_feasible() {
        let mut g = Graph::new(2);
        g.add_edge(v(0), v(1)).unwrap();
        let agents = vec![
            AgentSpec { id: AgentId(0), label: "a1".into(), source: v(0), target: v(0) },
            AgentSpec { id: AgentId(1), label: "a2".into(), source: v(1), target: v(1) },
        ];
        let inst = Instance::new(g, agents, 0);
        let sched = Schedule::new(vec![vec![v(0)], vec![v(1)]]).unwrap();
        assert_eq!(check_feasible(&inst, &sched), Ok(FeasibilityVerdict::Feasible));
    }

    #[test]
    fn swap_is_reported() {
        let mut g = Graph::new(2);
        g.add_edge(v(0), v(1)).unwrap();
        let agents = vec![
            AgentSpec { id: AgentId(0), label: "a1".into(), source: v(0), target: v(1) },
            AgentSpec { id: AgentId(1), label: "a2".into(), source: v(1), target: v(0) },
        ];
        let inst = Instance::new(g, agents, 1);
        let sched = Schedule::new(vec![vec![v(0), v(1)], vec![v(1), v(0)]]).unwrap();
        match check_feasible(&inst, &sched).unwrap() {
            FeasibilityVerdict::Violation(FeasibilityViolation::Swap { turn: 1, .. }) => {}
            other => panic!("expected swap violation, got {other:?}"),
        }
    }

    #[test]
    fn collision_and_teleport_are_reported() {
        let inst = fig1();
        let collide = Schedule::new(vec![vec![v(0), v(1), v(1)], vec![v(3), v(1), v(2)]]).unwrap();
        match check_feasible(&inst, &collide).unwrap() {
            FeasibilityVerdict::Violation(FeasibilityViolation::VertexCollision {
                turn: 1,
                vertex: VertexId(1),
                ..
            }) => {}
            other => panic!("expected collision, got {other:?}"),
        }
        let teleport = Schedule::new(vec![vec![v(0), v(2), v(1)], vec![v(3), v(1), v(2)]]).unwrap();
        match check_feasible(&inst, &teleport).unwrap() {
            FeasibilityVerdict::Violation(FeasibilityViolation::IllegalMove { turn: 1, .. }) => {}
            other => panic!("expected illegal move, got {other:?}"),
        }
    }

    #[test]
    fn wrong_endpoints_are_reported() {
        let inst = fig1();
        let wrong_source =
            Schedule::new(vec![vec![v(1), v(1), v(1)], vec![v(3), v(1), v(2)]]).unwrap();
        match check_feasible(&inst, &wrong_source).unwrap() {
            FeasibilityVerdict::Violation(FeasibilityViolation::WrongSource { .. }) => {}
            other => panic!("expected wrong source, got {other:?}"),
        }
        let missed = Schedule::new(vec![vec![v(0), v(0), v(0)], vec![v(3), v(1), v(2)]]).unwrap();
        match check_feasible(&inst, &missed).unwrap() {
            FeasibilityVerdict::Violation(FeasibilityViolation::TargetMissed {
                agent: AgentId(0),
                ..
            }) => {}
            other => panic!("expected missed target, got {other:?}"),
        }
    }

    #[test]
    fn missing_agent_row_is_a_hard_error() {
        let inst = fig1();
        let sched = Schedule::new(vec![vec![v(0), v(0), v(1)]]).unwrap();
        assert_eq!(
            check_feasible(&inst, &sched),
            Err(ModelError::AgentCountMismatch { expected: 2, found: 1 })
        );
    }
}

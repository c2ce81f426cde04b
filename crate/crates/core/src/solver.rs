//! Exact small-instance solver: breadth-first search over joint agent
//! configurations. Used as ground truth and to produce minimum-makespan
//! initial schedules; it deliberately does not scale.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{
    check_feasible, distance_lower_bound, validate_instance, FeasibilityVerdict,
    FeasibilityViolation, Instance, InstanceViolation, ModelError, Schedule, VertexId,
};

#[derive(Clone, Debug)]
pub struct SolverLimits {
    /// Refuse instances whose joint successor bound |V|^|A| exceeds this.
    pub max_joint_bound: u64,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            max_joint_bound: 10_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("instance is invalid: {}", format_violations(.0))]
    InvalidInstance(Vec<InstanceViolation>),
    #[error("joint configuration bound {bound} exceeds limit {limit}")]
    TooLarge { bound: u64, limit: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn format_violations(violations: &[InstanceViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A feasible schedule of minimum length.
    Solved(Schedule),
    /// No feasible schedule of length <= horizon cap exists.
    NoneWithinCap,
}

/// Minimum-makespan schedule by BFS over joint configurations. Successors are
/// generated agent-id-major and vertex-id-minor, so the returned schedule is
/// unique and reproducible. Swaps and vertex collisions are pruned during
/// successor generation.
pub fn solve_optimal(
    instance: &Instance,
    horizon_cap: u32,
    limits: &SolverLimits,
) -> Result<SolveOutcome, SolveError> {
    let violations = validate_instance(instance);
    if !violations.is_empty() {
        return Err(SolveError::InvalidInstance(violations));
    }
    let bound = joint_bound(instance);
    if bound > limits.max_joint_bound {
        return Err(SolveError::TooLarge {
            bound,
            limit: limits.max_joint_bound,
        });
    }
    if distance_lower_bound(instance).is_err() {
        // Some target is unreachable; no cap admits a schedule.
        return Ok(SolveOutcome::NoneWithinCap);
    }

    let start: Vec<VertexId> = instance.agents.iter().map(|a| a.source).collect();
    let goal: Vec<VertexId> = instance.agents.iter().map(|a| a.target).collect();

    let mut states: Vec<Vec<VertexId>> = vec![start.clone()];
    let mut parents: Vec<usize> = vec![usize::MAX];
    let mut depths: Vec<u32> = vec![0];
    let mut visited: HashMap<Vec<VertexId>, ()> = HashMap::new();
    visited.insert(start, ());

    let mut cursor = 0;
    while cursor < states.len() {
        let here = states[cursor].clone();
        let depth = depths[cursor];
        if here == goal {
            return Ok(SolveOutcome::Solved(reconstruct(
                instance, &states, &parents, cursor,
            )));
        }
        if depth < horizon_cap {
            let mut scratch = Vec::with_capacity(here.len());
            expand(
                instance,
                &here,
                &mut scratch,
                &mut |joint: &[VertexId]| {
                    if !visited.contains_key(joint) {
                        visited.insert(joint.to_vec(), ());
                        states.push(joint.to_vec());
                        parents.push(cursor);
                        depths.push(depth + 1);
                    }
                },
            );
        }
        cursor += 1;
    }
    Ok(SolveOutcome::NoneWithinCap)
}

fn joint_bound(instance: &Instance) -> u64 {
    let v = instance.graph.vertex_count() as u64;
    let mut bound: u64 = 1;
    for _ in 0..instance.agent_count() {
        bound = bound.saturating_mul(v);
    }
    bound
}

/// Enumerates all legal joint successors of `current` in canonical order,
/// pruning collisions and swaps as agents are placed.
fn expand(
    instance: &Instance,
    current: &[VertexId],
    partial: &mut Vec<VertexId>,
    emit: &mut impl FnMut(&[VertexId]),
) {
    let agent = partial.len();
    if agent == current.len() {
        emit(partial);
        return;
    }
    let from = current[agent];
    // Stay or step to a neighbor, in ascending vertex-id order.
    let mut candidates: Vec<VertexId> = instance.graph.neighbors(from).to_vec();
    let pos = candidates.binary_search(&from).unwrap_err();
    candidates.insert(pos, from);
    'next: for to in candidates {
        for prev in 0..agent {
            if partial[prev] == to {
                continue 'next; // vertex collision
            }
            if partial[prev] == from && current[prev] == to && from != to {
                continue 'next; // swap
            }
        }
        partial.push(to);
        expand(instance, current, partial, emit);
        partial.pop();
    }
}

fn reconstruct(
    instance: &Instance,
    states: &[Vec<VertexId>],
    parents: &[usize],
    goal_index: usize,
) -> Schedule {
    let mut chain = Vec::new();
    let mut at = goal_index;
    while at != usize::MAX {
        chain.push(at);
        at = parents[at];
    }
    chain.reverse();
    let rows = (0..instance.agent_count())
        .map(|a| chain.iter().map(|&s| states[s][a]).collect())
        .collect();
    Schedule::new(rows).expect("reconstructed rows are rectangular")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessVerdict {
    /// Feasible and as long as the distance lower bound: provably optimal.
    OptimalByWitness,
    /// Cannot certify optimality; never claims non-optimality.
    Undetermined(Option<FeasibilityViolation>),
}

/// Certifies optimality when a feasible schedule meets the distance bound.
pub fn verify_optimal_witness(
    instance: &Instance,
    schedule: &Schedule,
) -> Result<WitnessVerdict, ModelError> {
    match check_feasible(instance, schedule)? {
        FeasibilityVerdict::Violation(v) => Ok(WitnessVerdict::Undetermined(Some(v))),
        FeasibilityVerdict::Feasible => {
            let bound = distance_lower_bound(instance)?;
            if schedule.length_mu() == bound {
                Ok(WitnessVerdict::OptimalByWitness)
            } else {
                Ok(WitnessVerdict::Undetermined(None))
            }
        }
    }
}

//! The delay-1 schedule rewrite and its amortization.

use std::collections::BTreeSet;

use super::{AgentId, DelayEvent, ModelError, Schedule};

/// Rewrites `schedule` so that every agent of `delayed` spends one extra turn
/// on its turn `turn_i - 1` position: positions before `turn_i` are kept and
/// the suffix shifts back by one. Afterwards the lengths are amortized: if
/// every delayed agent's last two entries coincide the extra turn is pruned,
/// otherwise every other agent is extended by repeating its final position.
///
/// The result is total but possibly infeasible; callers re-check.
pub fn apply_delay1(
    schedule: &Schedule,
    delayed: &BTreeSet<AgentId>,
    turn_i: u32,
) -> Result<Schedule, ModelError> {
    if delayed.is_empty() {
        return Err(ModelError::EmptyDelaySet);
    }
    let mu = schedule.length_mu();
    if turn_i < 1 || turn_i > mu {
        return Err(ModelError::TurnOutOfRange { turn: turn_i, mu });
    }
    for &a in delayed {
        if a.index() >= schedule.agent_count() {
            return Err(ModelError::UnknownAgent(a));
        }
    }

    let i = turn_i as usize;
    let mut rows: Vec<Vec<super::VertexId>> = Vec::with_capacity(schedule.agent_count());
    for (idx, row) in schedule.rows().iter().enumerate() {
        if delayed.contains(&AgentId(idx as u32)) {
            // s'_j = s_j for j < i, s'_j = s_{j-1} for j >= i (length mu+1).
            let mut shifted = Vec::with_capacity(row.len() + 1);
            shifted.extend_from_slice(&row[..i]);
            shifted.extend_from_slice(&row[i - 1..]);
            rows.push(shifted);
        } else {
            rows.push(row.clone());
        }
    }

    let tail_stationary = delayed.iter().all(|a| {
        let row = &rows[a.index()];
        row[mu as usize] == row[mu as usize + 1]
    });
    if tail_stationary {
        for &a in delayed {
            rows[a.index()].truncate(mu as usize + 1);
        }
    } else {
        for (idx, row) in rows.iter_mut().enumerate() {
            if !delayed.contains(&AgentId(idx as u32)) {
                let last = *row.last().expect("schedule rows are nonempty");
                row.push(last);
            }
        }
    }
    Schedule::new(rows)
}

/// Folds `apply_delay1` over a nondecreasing-by-turn event list.
pub fn apply_delay_sequence(
    schedule: &Schedule,
    events: &[DelayEvent],
) -> Result<Schedule, ModelError> {
    for pair in events.windows(2) {
        if pair[1].turn < pair[0].turn {
            return Err(ModelError::UnsortedEvents {
                prev: pair[0].turn,
                next: pair[1].turn,
            });
        }
    }
    let mut current = schedule.clone();
    for event in events {
        current = apply_delay1(&current, &event.agents, event.turn)?;
    }
    Ok(current)
}

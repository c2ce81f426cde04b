//! Plain-text space-time diagrams: one row per agent, one column per turn,
//! cell = vertex label. Protocol delays are marked `*`, forced malfunctions
//! `!`.

use std::collections::HashSet;

use mapfma_core::engine::{Intent, RunResult};
use mapfma_core::model::Instance;

pub fn emit_spacetime(instance: &Instance, result: &RunResult) -> String {
    let schedule = &result.final_schedule;
    let turns = schedule.length_mu() as usize;

    // (agent, turn) cells where a delay-1 happened, split by cause.
    let mut forced: HashSet<(usize, usize)> = HashSet::new();
    let mut delayed: HashSet<(usize, usize)> = HashSet::new();
    for record in &result.trace {
        let t = record.turn as usize;
        for &(agent, intent) in &record.decisions {
            if matches!(intent, Intent::Malfunction) {
                forced.insert((agent.index(), t));
            }
        }
        for &(agent, _) in &record.modifications {
            delayed.insert((agent.index(), t));
        }
    }

    let cell = |agent: usize, turn: usize| {
        let label = instance.graph.label(schedule.rows()[agent][turn]);
        let mark = if forced.contains(&(agent, turn)) {
            "!"
        } else if delayed.contains(&(agent, turn)) {
            "*"
        } else {
            ""
        };
        format!("{label}{mark}")
    };

    let name_width = instance
        .agents
        .iter()
        .map(|a| a.label.len())
        .max()
        .unwrap_or(4)
        .max(4);
    let mut col_width = 2;
    for a in 0..instance.agent_count() {
        for t in 0..=turns {
            col_width = col_width.max(cell(a, t).len());
        }
    }

    let mut out = String::new();
    out.push_str(&format!("{:<name_width$}", "turn"));
    for t in 0..=turns {
        out.push_str(&format!(" {t:>col_width$}"));
    }
    out.push('\n');
    for (a, spec) in instance.agents.iter().enumerate() {
        out.push_str(&format!("{:<name_width$}", spec.label));
        for t in 0..=turns {
            out.push_str(&format!(" {:>col_width$}", cell(a, t)));
        }
        out.push('\n');
    }
    out
}

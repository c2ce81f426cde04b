//! Property tests for the schedule model: the delay-1 defining clauses, the
//! amortization dichotomy, and agreement of the feasibility checker with a
//! naive pairwise oracle.

use std::collections::BTreeSet;

use proptest::prelude::*;

use mapfma_core::model::{
    apply_delay1, check_feasible, AgentId, AgentSpec, FeasibilityVerdict, Graph, Instance,
    Schedule, VertexId,
};

/// Arbitrary graph + total (not necessarily feasible) schedule.
fn arb_world() -> impl Strategy<Value = (Instance, Schedule)> {
    (2usize..8, 1usize..5, 1usize..7).prop_flat_map(|(vertices, agents, mu)| {
        let agents = agents.min(vertices);
        let edges = proptest::collection::vec(
            (0..vertices as u32, 0..vertices as u32),
            0..vertices * 2,
        );
        let rows = proptest::collection::vec(
            proptest::collection::vec(0..vertices as u32, mu + 1),
            agents,
        );
        (Just(vertices), edges, rows).prop_map(|(vertices, edges, rows)| {
            let mut graph = Graph::new(vertices);
            for (u, v) in edges {
                let _ = graph.add_edge(VertexId(u), VertexId(v));
            }
            let specs = rows
                .iter()
                .enumerate()
                .map(|(i, row)| AgentSpec {
                    id: AgentId(i as u32),
                    label: format!("a{}", i + 1),
                    source: VertexId(row[0]),
                    target: VertexId(*row.last().unwrap()),
                })
                .collect();
            let instance = Instance::new(graph, specs, rows[0].len() as u32 - 1);
            let schedule = Schedule::new(
                rows.into_iter()
                    .map(|r| r.into_iter().map(VertexId).collect())
                    .collect(),
            )
            .unwrap();
            (instance, schedule)
        })
    })
}

/// Exhaustive pairwise re-implementation of the motion rules.
fn brute_force_feasible(instance: &Instance, schedule: &Schedule) -> bool {
    let mu = schedule.length_mu();
    let n = schedule.agent_count();
    for a in 0..n {
        let id = AgentId(a as u32);
        if schedule.position(id, 0) != instance.agents[a].source {
            return false;
        }
        if schedule.position(id, mu) != instance.agents[a].target {
            return false;
        }
    }
    for turn in 0..=mu {
        for a in 0..n {
            for b in 0..n {
                if a != b
                    && schedule.position(AgentId(a as u32), turn)
                        == schedule.position(AgentId(b as u32), turn)
                {
                    return false;
                }
            }
        }
    }
    for turn in 1..=mu {
        for a in 0..n {
            let from = schedule.position(AgentId(a as u32), turn - 1);
            let to = schedule.position(AgentId(a as u32), turn);
            if from != to && !instance.graph.has_edge(from, to) {
                return false;
            }
            for b in 0..n {
                if a == b {
                    continue;
                }
                let b_from = schedule.position(AgentId(b as u32), turn - 1);
                let b_to = schedule.position(AgentId(b as u32), turn);
                if from != to && to == b_from && b_to == from {
                    return false;
                }
            }
        }
    }
    true
}

proptest! {
    #[test]
    fn delay1_satisfies_its_defining_clauses((_, schedule) in arb_world(),
                                             pick in proptest::collection::vec(any::<prop::sample::Index>(), 1..4),
                                             turn_index in any::<prop::sample::Index>()) {
        let mu = schedule.length_mu();
        prop_assume!(mu >= 1);
        let delayed: BTreeSet<AgentId> = pick
            .iter()
            .map(|ix| AgentId(ix.index(schedule.agent_count()) as u32))
            .collect();
        let turn = 1 + turn_index.index(mu as usize) as u32;
        let out = apply_delay1(&schedule, &delayed, turn).unwrap();

        // Dichotomy: the amortized length is mu or mu+1, never anything else.
        prop_assert!(out.length_mu() == mu || out.length_mu() == mu + 1);

        for a in 0..schedule.agent_count() {
            let id = AgentId(a as u32);
            if delayed.contains(&id) {
                for j in 0..turn {
                    prop_assert_eq!(out.position(id, j), schedule.position(id, j));
                }
                for j in turn..=out.length_mu() {
                    prop_assert_eq!(out.position(id, j), schedule.position(id, (j - 1).min(mu)));
                }
            } else {
                for j in 0..=out.length_mu() {
                    prop_assert_eq!(out.position(id, j), schedule.position(id, j.min(mu)));
                }
            }
        }
    }

    #[test]
    fn feasibility_checker_agrees_with_pairwise_oracle((instance, schedule) in arb_world()) {
        let verdict = check_feasible(&instance, &schedule).unwrap();
        prop_assert_eq!(
            matches!(verdict, FeasibilityVerdict::Feasible),
            brute_force_feasible(&instance, &schedule)
        );
    }
}

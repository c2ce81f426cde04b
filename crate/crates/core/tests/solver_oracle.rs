//! The joint-state BFS against an independent exhaustive enumeration of all
//! feasible schedules, plus the reference-instance claims.

use mapfma_core::gen::{gen_fig1, gen_fig2};
use mapfma_core::model::{
    check_feasible, distance_lower_bound, AgentId, AgentSpec, Graph, Instance, VertexId,
};
use mapfma_core::solver::{
    solve_optimal, verify_optimal_witness, SolveOutcome, SolverLimits, WitnessVerdict,
};

/// Minimum feasible schedule length by plain depth-first enumeration of all
/// move trees, one target length at a time. No visited-state reuse: this is
/// deliberately a different algorithm than the BFS it checks.
fn exhaustive_minimum(instance: &Instance, cap: u32) -> Option<u32> {
    fn extend(
        instance: &Instance,
        current: &[VertexId],
        remaining: u32,
        goal: &[VertexId],
    ) -> bool {
        if remaining == 0 {
            return current == goal;
        }
        let n = current.len();
        let mut next = vec![VertexId(0); n];
        fn place(
            instance: &Instance,
            current: &[VertexId],
            next: &mut Vec<VertexId>,
            agent: usize,
            remaining: u32,
            goal: &[VertexId],
        ) -> bool {
            let n = current.len();
            if agent == n {
                let frozen = next.clone();
                return extend(instance, &frozen, remaining - 1, goal);
            }
            let from = current[agent];
            let mut candidates = vec![from];
            candidates.extend_from_slice(instance.graph.neighbors(from));
            'cand: for to in candidates {
                for prev in 0..agent {
                    if next[prev] == to {
                        continue 'cand;
                    }
                    if next[prev] == from && current[prev] == to && from != to {
                        continue 'cand;
                    }
                }
                next[agent] = to;
                if place(instance, current, next, agent + 1, remaining, goal) {
                    return true;
                }
            }
            false
        }
        place(instance, current, &mut next, 0, remaining, goal)
    }

    let start: Vec<VertexId> = instance.agents.iter().map(|a| a.source).collect();
    let goal: Vec<VertexId> = instance.agents.iter().map(|a| a.target).collect();
    (0..=cap).find(|&len| extend(instance, &start, len, &goal))
}

fn crossing_instance() -> Instance {
    // 3x3 grid, two agents crossing between opposite corners.
    let mut graph = Graph::new(9);
    let at = |r: u32, c: u32| VertexId(r * 3 + c);
    for r in 0..3 {
        for c in 0..3 {
            if c + 1 < 3 {
                graph.add_edge(at(r, c), at(r, c + 1)).unwrap();
            }
            if r + 1 < 3 {
                graph.add_edge(at(r, c), at(r + 1, c)).unwrap();
            }
        }
    }
    let agents = vec![
        AgentSpec { id: AgentId(0), label: "a1".into(), source: at(0, 0), target: at(2, 2) },
        AgentSpec { id: AgentId(1), label: "a2".into(), source: at(2, 2), target: at(0, 0) },
    ];
    Instance::new(graph, agents, 6)
}

#[test]
fn fig1_optimum_is_two() {
    let (instance, _) = gen_fig1();
    match solve_optimal(&instance, 6, &SolverLimits::default()).unwrap() {
        SolveOutcome::Solved(s) => {
            assert_eq!(s.length_mu(), 2);
            assert!(check_feasible(&instance, &s).unwrap().is_feasible());
        }
        other => panic!("expected solution, got {other:?}"),
    }
}

#[test]
fn fig2_schedule_is_optimal_by_witness() {
    let (instance, schedule) = gen_fig2();
    assert_eq!(distance_lower_bound(&instance).unwrap(), 9);
    assert_eq!(
        verify_optimal_witness(&instance, &schedule).unwrap(),
        WitnessVerdict::OptimalByWitness
    );
}

#[test]
fn bfs_matches_exhaustive_enumeration_on_crossing_agents() {
    let instance = crossing_instance();
    let expected = exhaustive_minimum(&instance, 6).expect("solvable within 6");
    match solve_optimal(&instance, 6, &SolverLimits::default()).unwrap() {
        SolveOutcome::Solved(s) => assert_eq!(s.length_mu(), expected),
        other => panic!("expected solution, got {other:?}"),
    }
}

#[test]
fn bfs_matches_exhaustive_enumeration_on_small_instances() {
    // A couple of hand-shaped instances with up to 3 agents and 10 vertices.
    let mut cases: Vec<Instance> = Vec::new();
    {
        let mut g = Graph::new(5);
        for i in 0..4 {
            g.add_edge(VertexId(i), VertexId(i + 1)).unwrap();
        }
        cases.push(Instance::new(
            g,
            vec![
                AgentSpec { id: AgentId(0), label: "a1".into(), source: VertexId(0), target: VertexId(4) },
                AgentSpec { id: AgentId(1), label: "a2".into(), source: VertexId(2), target: VertexId(1) },
            ],
            5,
        ));
    }
    {
        // Cycle of 6: three agents rotating.
        let mut g = Graph::new(6);
        for i in 0..6 {
            g.add_edge(VertexId(i), VertexId((i + 1) % 6)).unwrap();
        }
        cases.push(Instance::new(
            g,
            vec![
                AgentSpec { id: AgentId(0), label: "a1".into(), source: VertexId(0), target: VertexId(2) },
                AgentSpec { id: AgentId(1), label: "a2".into(), source: VertexId(2), target: VertexId(4) },
                AgentSpec { id: AgentId(2), label: "a3".into(), source: VertexId(4), target: VertexId(0) },
            ],
            4,
        ));
    }
    for instance in cases {
        let expected = exhaustive_minimum(&instance, 6);
        let got = match solve_optimal(&instance, 6, &SolverLimits::default()).unwrap() {
            SolveOutcome::Solved(s) => {
                assert!(check_feasible(&instance, &s).unwrap().is_feasible());
                Some(s.length_mu())
            }
            SolveOutcome::NoneWithinCap => None,
        };
        assert_eq!(got, expected);
    }
}

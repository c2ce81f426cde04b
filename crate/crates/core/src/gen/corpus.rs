//! The deterministic small-instance corpus used by the property suites:
//! every grid shape up to 3x3 with up to three agents across a few seeds
//! (kept only when the exact solver finds an optimum within six turns),
//! plus the two reference instances.

use super::{gen_fig1, gen_fig2, gen_grid};
use crate::model::{AgentId, AgentSpec, Graph, Instance, Schedule, VertexId};
use crate::solver::{solve_optimal, SolveOutcome, SolverLimits};

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub instance: Instance,
    pub schedule: Schedule,
}

const GRID_CAP: u32 = 6;
const SHAPES: [(usize, usize); 5] = [(1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];
const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

/// Path v0..v4 with a spur on the middle vertex; two agents heading in
/// opposite directions must dodge through the spur.
fn corridor() -> Instance {
    let mut g = Graph::new(6);
    for i in 0..4 {
        g.add_edge(VertexId(i), VertexId(i + 1)).unwrap();
    }
    g.add_edge(VertexId(2), VertexId(5)).unwrap();
    let agents = vec![
        AgentSpec { id: AgentId(0), label: "a1".into(), source: VertexId(0), target: VertexId(4) },
        AgentSpec { id: AgentId(1), label: "a2".into(), source: VertexId(4), target: VertexId(0) },
    ];
    Instance::new(g, agents, 0)
}

/// Three agents rotating two steps around a six-cycle; every move is part of
/// a vacate-and-enter chain.
fn cycle6() -> Instance {
    let mut g = Graph::new(6);
    for i in 0..6 {
        g.add_edge(VertexId(i), VertexId((i + 1) % 6)).unwrap();
    }
    let agents = vec![
        AgentSpec { id: AgentId(0), label: "a1".into(), source: VertexId(0), target: VertexId(2) },
        AgentSpec { id: AgentId(1), label: "a2".into(), source: VertexId(2), target: VertexId(4) },
        AgentSpec { id: AgentId(2), label: "a3".into(), source: VertexId(4), target: VertexId(0) },
    ];
    Instance::new(g, agents, 0)
}

pub fn acceptance_corpus() -> Vec<CorpusEntry> {
    let mut corpus = Vec::new();
    let (fig1, fig1_schedule) = gen_fig1();
    corpus.push(CorpusEntry {
        name: "fig1".into(),
        instance: fig1,
        schedule: fig1_schedule,
    });
    let (fig2, fig2_schedule) = gen_fig2();
    corpus.push(CorpusEntry {
        name: "fig2".into(),
        instance: fig2,
        schedule: fig2_schedule,
    });

    let limits = SolverLimits::default();
    let solved = |name: String, mut instance: Instance, corpus: &mut Vec<CorpusEntry>| {
        if let Ok(SolveOutcome::Solved(schedule)) = solve_optimal(&instance, GRID_CAP, &limits) {
            if schedule.length_mu() >= 1 {
                instance.makespan_ell = schedule.length_mu();
                corpus.push(CorpusEntry { name, instance, schedule });
            }
        }
    };
    solved("corridor".into(), corridor(), &mut corpus);
    solved("cycle6".into(), cycle6(), &mut corpus);
    for (rows, cols) in SHAPES {
        for agents in 1..=3usize {
            if rows * cols < 2 * agents {
                continue;
            }
            for seed in SEEDS {
                let Ok(instance) = gen_grid(rows, cols, agents, seed, GRID_CAP) else {
                    continue;
                };
                solved(
                    format!("grid{rows}x{cols}-a{agents}-s{seed}"),
                    instance,
                    &mut corpus,
                );
            }
        }
    }
    corpus
}

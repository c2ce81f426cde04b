//! Seeded random grid instances for the property-test corpus.

use rand::seq::index::sample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::GenError;
use crate::model::{AgentId, AgentSpec, Graph, Instance, VertexId};
use crate::solver::{solve_optimal, SolveOutcome, SolverLimits};

/// 4-connected `rows x cols` grid with `num_agents` agents on distinct random
/// sources and distinct random targets, reproducible from `seed`. Only
/// instances the exact solver handles within `cap` turns are emitted; the
/// instance's makespan is set to that optimum.
pub fn gen_grid(
    rows: usize,
    cols: usize,
    num_agents: usize,
    seed: u64,
    cap: u32,
) -> Result<Instance, GenError> {
    let cells = rows * cols;
    if cells < 2 * num_agents {
        return Err(GenError::TooManyAgents {
            cells,
            agents: num_agents,
        });
    }
    let limits = SolverLimits::default();
    const ATTEMPTS: u32 = 16;
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let sources = sample(&mut rng, cells, num_agents);
        let targets = sample(&mut rng, cells, num_agents);
        let mut instance = build(rows, cols, 0);
        for (idx, (s, t)) in sources.iter().zip(targets.iter()).enumerate() {
            instance.agents.push(AgentSpec {
                id: AgentId(idx as u32),
                label: format!("a{}", idx + 1),
                source: VertexId(s as u32),
                target: VertexId(t as u32),
            });
        }
        match solve_optimal(&instance, cap, &limits)? {
            SolveOutcome::Solved(schedule) => {
                instance.makespan_ell = schedule.length_mu();
                return Ok(instance);
            }
            SolveOutcome::NoneWithinCap => continue,
        }
    }
    Err(GenError::NoSolvableInstance {
        attempts: ATTEMPTS,
        cap,
    })
}

fn build(rows: usize, cols: usize, ell: u32) -> Instance {
    let labels = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| format!("r{r}c{c}")))
        .collect();
    let mut graph = Graph::with_labels(labels).expect("distinct labels");
    let at = |r: usize, c: usize| VertexId((r * cols + c) as u32);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                graph.add_edge(at(r, c), at(r, c + 1)).unwrap();
            }
            if r + 1 < rows {
                graph.add_edge(at(r, c), at(r + 1, c)).unwrap();
            }
        }
    }
    Instance::new(graph, Vec::new(), ell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn two_by_two_single_agent_is_valid() {
        let inst = gen_grid(2, 2, 1, 1, 6).unwrap();
        assert!(validate_instance(&inst).is_empty());
        assert_eq!(inst.graph.vertex_count(), 4);
        assert_eq!(inst.agent_count(), 1);
    }

    #[test]
    fn same_seed_gives_identical_instances() {
        let a = gen_grid(3, 3, 3, 7, 6).unwrap();
        let b = gen_grid(3, 3, 3, 7, 6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_many_agents_is_rejected() {
        match gen_grid(1, 3, 2, 0, 6) {
            Err(GenError::TooManyAgents { cells: 3, agents: 2 }) => {}
            other => panic!("expected rejection, got {other:?}"),
        }
    }
}

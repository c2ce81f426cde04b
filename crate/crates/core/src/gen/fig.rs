//! The two reference instances: the four-vertex infinite-delay example and
//! the three-arm large-delay example. Both are constant functions.

use crate::model::{AgentId, AgentSpec, Graph, Instance, Schedule, VertexId};

/// Four vertices u1..u4 with edges u1u2, u2u3, u2u4; a1: u1 -> u2 and
/// a2: u4 -> u3, with the unique two-turn optimum.
pub fn gen_fig1() -> (Instance, Schedule) {
    let mut graph = Graph::with_labels(
        ["u1", "u2", "u3", "u4"].map(String::from).to_vec(),
    )
    .expect("distinct labels");
    let u = |i: u32| VertexId(i - 1);
    graph.add_edge(u(1), u(2)).unwrap();
    graph.add_edge(u(2), u(3)).unwrap();
    graph.add_edge(u(2), u(4)).unwrap();
    let agents = vec![
        AgentSpec { id: AgentId(0), label: "a1".into(), source: u(1), target: u(2) },
        AgentSpec { id: AgentId(1), label: "a2".into(), source: u(4), target: u(3) },
    ];
    let instance = Instance::new(graph, agents, 2);
    let schedule = Schedule::new(vec![
        vec![u(1), u(1), u(2)],
        vec![u(4), u(2), u(3)],
    ])
    .unwrap();
    (instance, schedule)
}

/// Triangle v1v2v3 with one arm per corner. Arm i carries the critical vertex
/// c_i (adjacent to v_i), an auxiliary path p1..p7-c_i-p9-p10 with two black
/// agents at p1/p2 and their terminals at p9/p10, and a colored branch
/// q1-q2-q3-c_i. Colored agent a_i starts on arm i's q1 and targets the q1 of
/// the next arm around the triangle, nine hops away.
///
/// The nine-turn schedule routes every colored agent along its unique
/// shortest path; the black agents move in turns 1..=5, wait in turn 6 on the
/// two vertices before their critical vertex, and finish in turns 7..=9, so
/// each critical vertex is held by black agents in turns 7 and 8.
pub fn gen_fig2() -> (Instance, Schedule) {
    let mut labels: Vec<String> = ["v1", "v2", "v3", "c1", "c2", "c3"]
        .map(String::from)
        .to_vec();
    for arm in 1..=3 {
        for p in [1, 2, 3, 4, 5, 6, 7, 9, 10] {
            labels.push(format!("p{p}_{arm}"));
        }
        for q in 1..=3 {
            labels.push(format!("q{q}_{arm}"));
        }
    }
    let mut graph = Graph::with_labels(labels).expect("distinct labels");

    let v = |i: usize| VertexId(i as u32 - 1); // v1..v3 -> 0..2
    let c = |i: usize| VertexId(i as u32 + 2); // c1..c3 -> 3..5
    let arm_base = |i: usize| 6 + (i - 1) * 12;
    // p1..p7 at offsets 0..6, p9 at 7, p10 at 8, q1..q3 at 9..11.
    let p = |i: usize, k: usize| {
        let offset = if k <= 7 { k - 1 } else { k - 2 };
        VertexId((arm_base(i) + offset) as u32)
    };
    let q = |i: usize, k: usize| VertexId((arm_base(i) + 8 + k) as u32);

    graph.add_edge(v(1), v(2)).unwrap();
    graph.add_edge(v(2), v(3)).unwrap();
    graph.add_edge(v(3), v(1)).unwrap();
    for i in 1..=3 {
        graph.add_edge(c(i), v(i)).unwrap();
        for k in 1..7 {
            graph.add_edge(p(i, k), p(i, k + 1)).unwrap();
        }
        graph.add_edge(p(i, 7), c(i)).unwrap();
        graph.add_edge(c(i), p(i, 9)).unwrap();
        graph.add_edge(p(i, 9), p(i, 10)).unwrap();
        graph.add_edge(q(i, 1), q(i, 2)).unwrap();
        graph.add_edge(q(i, 2), q(i, 3)).unwrap();
        graph.add_edge(q(i, 3), c(i)).unwrap();
    }

    let mut agents = Vec::new();
    // Colored agent a_i exits through the previous arm around the triangle:
    // a1 -> arm 3 (red terminal), a2 -> arm 1 (blue), a3 -> arm 2 (brown).
    let target_arm = |i: usize| (i + 1) % 3 + 1;
    for i in 1..=3 {
        agents.push(AgentSpec {
            id: AgentId(agents.len() as u32),
            label: format!("a{i}"),
            source: q(i, 1),
            target: q(target_arm(i), 1),
        });
    }
    for i in 1..=3 {
        // Leading black agent (one step closer to the critical vertex) goes
        // to the far terminal; the trailing one stops on the near terminal.
        agents.push(AgentSpec {
            id: AgentId(agents.len() as u32),
            label: format!("b1_{i}"),
            source: p(i, 2),
            target: p(i, 10),
        });
        agents.push(AgentSpec {
            id: AgentId(agents.len() as u32),
            label: format!("b2_{i}"),
            source: p(i, 1),
            target: p(i, 9),
        });
    }
    let instance = Instance::new(graph, agents, 9);

    let mut rows: Vec<Vec<VertexId>> = Vec::new();
    for i in 1..=3 {
        let t = target_arm(i);
        rows.push(vec![
            q(i, 1),
            q(i, 2),
            q(i, 3),
            c(i),
            v(i),
            v(t), // turn-5 rotation: a1 v1->v3, a2 v2->v1, a3 v3->v2
            c(t),
            q(t, 3),
            q(t, 2),
            q(t, 1),
        ]);
    }
    for i in 1..=3 {
        rows.push(vec![
            p(i, 2), p(i, 3), p(i, 4), p(i, 5), p(i, 6), p(i, 7), p(i, 7),
            c(i), p(i, 9), p(i, 10),
        ]);
        rows.push(vec![
            p(i, 1), p(i, 2), p(i, 3), p(i, 4), p(i, 5), p(i, 6), p(i, 6),
            p(i, 7), c(i), p(i, 9),
        ]);
    }
    // Interleave black rows to match agent id order (a1,a2,a3,b1_1,b2_1,...).
    let schedule = Schedule::new(rows).unwrap();
    (instance, schedule)
}

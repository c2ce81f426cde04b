//! 3-SAT reduction: builds the gadget graph, its agents, the tight initial
//! schedule, and the assignment-driven delay repair.
//!
//! For a formula with `n` variables and `m` clauses the construction uses
//! `2n+m` gadgets of `4n+2` three-vertex rows, a spine path `v_1..v_{2n+m+2}`
//! with an introduce-delay agent at its end, two variable agents per variable
//! crossing every gadget on their fixed rows, one red agent per gadget
//! (select-assignment, clause, verifying-assignment), and blocking agents
//! whose source-target distance equals the makespan `14n+3m+5` exactly, so
//! none of them can absorb a delay. A turn-1 malfunction of the introduce
//! agent stalls the spine; delays restoring makespan `ell` exist iff the
//! formula is satisfiable, and `repair_from_assignment` emits them.

use std::collections::{BTreeMap, BTreeSet};

use super::{CnfFormula, GenError};
use crate::model::{
    AgentId, AgentSpec, DelayEvent, Graph, Instance, Schedule, VertexId,
};

/// Vertex and agent maps of one generated hardness instance.
#[derive(Clone, Debug)]
pub struct HardnessLayout {
    pub n: u32,
    pub m: u32,
    pub ell: u32,
    /// 2n+m.
    pub gadget_count: u32,
    /// 4n+2.
    pub rows: u32,
    gadget: Vec<Vec<[VertexId; 3]>>,
    s_h: Vec<Vec<Vec<VertexId>>>,
    t_h: Vec<Vec<Vec<VertexId>>>,
    pub spine: Vec<VertexId>,
    s_p: Vec<Vec<VertexId>>,
    t_p: Vec<Vec<VertexId>>,
    p_yes: Vec<Vec<VertexId>>,
    p_no: Vec<Vec<VertexId>>,
    q_yes: Vec<Vec<VertexId>>,
    q_no: Vec<Vec<VertexId>>,
    pub nu: Vec<AgentId>,
    pub mu: Vec<AgentId>,
    pub lambda: Vec<AgentId>,
    pub tau: Vec<AgentId>,
    pub kappa: Vec<AgentId>,
    pub intro: AgentId,
    pub blocking: Vec<AgentId>,
    /// Per clause: sorted distinct literal indices (4(i-1)+3 or 4i+1).
    pub literal_indices: Vec<Vec<u32>>,
    formula: CnfFormula,
}

impl HardnessLayout {
    /// Vertex `u^j_{p,q}` (all arguments 1-based).
    pub fn gadget_vertex(&self, j: u32, p: u32, q: u32) -> VertexId {
        self.gadget[j as usize - 1][p as usize - 1][q as usize - 1]
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }
}

struct Builder {
    labels: Vec<String>,
    edges: Vec<(VertexId, VertexId)>,
}

impl Builder {
    fn new() -> Builder {
        Builder { labels: Vec::new(), edges: Vec::new() }
    }

    fn vertex(&mut self, label: String) -> VertexId {
        self.labels.push(label);
        VertexId(self.labels.len() as u32 - 1)
    }

    fn edge(&mut self, u: VertexId, v: VertexId) {
        self.edges.push((u, v));
    }

    /// Chained path of `count` vertices labelled `{prefix}_1..{prefix}_count`.
    fn path(&mut self, prefix: &str, count: usize) -> Vec<VertexId> {
        let vs: Vec<VertexId> = (1..=count)
            .map(|t| self.vertex(format!("{prefix}_{t}")))
            .collect();
        for pair in vs.windows(2) {
            self.edge(pair[0], pair[1]);
        }
        vs
    }

    fn build(self) -> Graph {
        let mut graph = Graph::with_labels(self.labels).expect("generated labels are distinct");
        for (u, v) in self.edges {
            graph.add_edge(u, v).expect("generated edges are simple");
        }
        graph
    }
}

/// Literal indices of clause `j`: `4(i-1)+3` for a positive occurrence of
/// variable `i`, `4i+1` for a negative one; duplicates collapse.
fn clause_indices(formula: &CnfFormula, j: usize) -> Vec<u32> {
    let mut set = BTreeSet::new();
    for lit in &formula.clauses[j] {
        let idx = if lit.positive { 4 * (lit.var - 1) + 3 } else { 4 * lit.var + 1 };
        set.insert(idx);
    }
    set.into_iter().collect()
}

/// Builds the full construction and the designated turn-1 malfunction of the
/// introduce-delay agent.
pub fn build_hardness_instance(
    formula: &CnfFormula,
) -> Result<(Instance, Schedule, HardnessLayout, (u32, AgentId)), GenError> {
    let n = formula.num_vars;
    let m = formula.num_clauses() as u32;
    let gadget_count = 2 * n + m;
    let rows = 4 * n + 2;
    let ell = 14 * n + 3 * m + 5;
    // Blocking paths: 14n+3m+5 edges on gadget anchors, one more on the spine.
    let h_block_len = (ell + 1) as usize;
    let p_block_len = (ell + 2) as usize;

    let mut b = Builder::new();

    // Spine path v_1..v_{2n+m+2}.
    let spine: Vec<VertexId> = (1..=gadget_count + 2)
        .map(|i| b.vertex(format!("v{i}")))
        .collect();
    for pair in spine.windows(2) {
        b.edge(pair[0], pair[1]);
    }

    // Gadgets with their rows, cross families and blocking paths.
    let mut gadget: Vec<Vec<[VertexId; 3]>> = Vec::new();
    let mut s_h: Vec<Vec<Vec<VertexId>>> = Vec::new();
    let mut t_h: Vec<Vec<Vec<VertexId>>> = Vec::new();
    for j in 1..=gadget_count {
        let mut gadget_rows: Vec<[VertexId; 3]> = Vec::new();
        for p in 1..=rows {
            let row = [
                b.vertex(format!("g{j}_u{p}_1")),
                b.vertex(format!("g{j}_u{p}_2")),
                b.vertex(format!("g{j}_u{p}_3")),
            ];
            b.edge(row[0], row[1]);
            b.edge(row[1], row[2]);
            gadget_rows.push(row);
        }
        for p in 0..(rows as usize - 1) {
            b.edge(gadget_rows[p][0], gadget_rows[p + 1][0]);
            b.edge(gadget_rows[p][2], gadget_rows[p + 1][2]);
        }
        for q in 1..=2 * n as usize {
            let odd_below = gadget_rows[2 * q - 2][0]; // u_{2q-1,1}
            let even_mid = gadget_rows[2 * q - 1][1]; // u_{2q,2}
            let even_right = gadget_rows[2 * q - 1][2]; // u_{2q,3}
            let odd_above = gadget_rows[2 * q][0]; // u_{2q+1,1}
            b.edge(odd_below, even_right);
            b.edge(even_right, odd_above);
            b.edge(odd_below, even_mid);
            b.edge(even_mid, odd_above);
        }
        let mut s_paths = Vec::new();
        let mut t_paths = Vec::new();
        for p in 1..=rows - 1 {
            let s = b.path(&format!("g{j}_S{p}"), h_block_len);
            b.edge(s[0], gadget_rows[p as usize - 1][0]);
            s_paths.push(s);
            let t = b.path(&format!("g{j}_T{p}"), h_block_len);
            b.edge(t[0], gadget_rows[p as usize - 1][0]);
            t_paths.push(t);
        }
        gadget.push(gadget_rows);
        s_h.push(s_paths);
        t_h.push(t_paths);
    }

    // Consecutive gadgets chain on every anchored row.
    for j in 0..(gadget_count as usize - 1) {
        for (left, right) in gadget[j].iter().zip(&gadget[j + 1]).take(rows as usize - 1) {
            b.edge(left[2], right[0]);
        }
    }

    // Spine to gadget entrances, and spine blocking paths.
    for i in 1..=gadget_count as usize {
        b.edge(spine[i], gadget[i - 1][0][0]);
    }
    let mut s_p = Vec::new();
    let mut t_p = Vec::new();
    for i in 1..=(gadget_count + 1) as usize {
        let s = b.path(&format!("PS{i}"), p_block_len);
        b.edge(s[0], spine[i - 1]);
        s_p.push(s);
        let t = b.path(&format!("PT{i}"), p_block_len);
        b.edge(t[0], spine[i - 1]);
        t_p.push(t);
    }

    // Variable paths: two on top of gadget 1, two below the last gadget.
    let mut p_yes = Vec::new();
    let mut p_no = Vec::new();
    let mut q_yes = Vec::new();
    let mut q_no = Vec::new();
    let last = gadget_count as usize - 1;
    for i in 1..=n {
        let yes_row = (4 * (i - 1) + 2) as usize - 1;
        let no_row = (4 * i) as usize - 1;
        let py = b.path(&format!("Py{i}"), (4 * n + 3) as usize);
        b.edge(*py.last().unwrap(), gadget[0][yes_row][0]);
        p_yes.push(py);
        let pn = b.path(&format!("Pn{i}"), (4 * n + 3) as usize);
        b.edge(*pn.last().unwrap(), gadget[0][no_row][0]);
        p_no.push(pn);
        let qy = b.path(&format!("Qy{i}"), (4 * n + 2) as usize);
        b.edge(qy[0], gadget[last][yes_row][2]);
        q_yes.push(qy);
        let qn = b.path(&format!("Qn{i}"), (4 * n + 2) as usize);
        b.edge(qn[0], gadget[last][no_row][2]);
        q_no.push(qn);
    }

    let graph = b.build();

    // Agents, in a fixed roster order.
    let mut agents: Vec<AgentSpec> = Vec::new();
    let add = |agents: &mut Vec<AgentSpec>, label: String, source: VertexId, target: VertexId| {
        let id = AgentId(agents.len() as u32);
        agents.push(AgentSpec { id, label, source, target });
        id
    };
    let nu: Vec<AgentId> = (1..=n as usize)
        .map(|i| {
            add(
                &mut agents,
                format!("nu{i}"),
                p_yes[i - 1][0],
                *q_yes[i - 1].last().unwrap(),
            )
        })
        .collect();
    let mu: Vec<AgentId> = (1..=n as usize)
        .map(|i| {
            add(
                &mut agents,
                format!("mu{i}"),
                p_no[i - 1][0],
                *q_no[i - 1].last().unwrap(),
            )
        })
        .collect();
    let lambda: Vec<AgentId> = (1..=n)
        .map(|i| {
            add(
                &mut agents,
                format!("lam{i}"),
                spine[i as usize - 1],
                gadget[i as usize - 1][rows as usize - 1][0],
            )
        })
        .collect();
    let tau: Vec<AgentId> = (1..=n)
        .map(|i| {
            let g = (n + m + i) as usize;
            add(
                &mut agents,
                format!("tau{i}"),
                spine[g - 1],
                gadget[g - 1][rows as usize - 1][0],
            )
        })
        .collect();
    let kappa: Vec<AgentId> = (1..=m)
        .map(|j| {
            let g = (n + j) as usize;
            add(
                &mut agents,
                format!("kap{j}"),
                spine[g - 1],
                gadget[g - 1][rows as usize - 1][0],
            )
        })
        .collect();
    let intro = add(
        &mut agents,
        "a".into(),
        spine[gadget_count as usize],
        spine[gadget_count as usize + 1],
    );

    let mut blocking: Vec<AgentId> = Vec::new();
    let mut blocking_rows: Vec<Vec<VertexId>> = Vec::new();
    let top = rows as usize - 2; // row 4n+1 (0-based index)
    for j in 1..=gadget_count {
        for i in 1..=3 * j {
            let s_pos = 4 * n + 2 + i;
            let t_pos = 10 * n + 3 * m + 3 - i;
            let id = add(
                &mut agents,
                format!("bg{j}_{i}"),
                s_h[j as usize - 1][top][s_pos as usize - 1],
                t_h[j as usize - 1][top][t_pos as usize - 1],
            );
            blocking.push(id);
            blocking_rows.push(blocking_route(
                &s_h[j as usize - 1][top],
                s_pos as usize - 1,
                gadget[j as usize - 1][top][0],
                &t_h[j as usize - 1][top],
                t_pos as usize - 1,
                ell,
            ));
        }
    }
    for j in 1..=gadget_count {
        for p in 1..=4 * n {
            let s_pos = 4 * n + 2 + 3 * j;
            let t_pos = 10 * n + 3 * m + 3 - 3 * j;
            let id = add(
                &mut agents,
                format!("br{j}_{p}"),
                s_h[j as usize - 1][p as usize - 1][s_pos as usize - 1],
                t_h[j as usize - 1][p as usize - 1][t_pos as usize - 1],
            );
            blocking.push(id);
            blocking_rows.push(blocking_route(
                &s_h[j as usize - 1][p as usize - 1],
                s_pos as usize - 1,
                gadget[j as usize - 1][p as usize - 1][0],
                &t_h[j as usize - 1][p as usize - 1],
                t_pos as usize - 1,
                ell,
            ));
        }
    }
    for i in 1..=gadget_count {
        for qq in 1..=10 * n + 3 * m {
            let s_pos = qq + 2;
            let t_pos = 14 * n + 3 * m + 3 - qq;
            let id = add(
                &mut agents,
                format!("bp{i}_{qq}"),
                s_p[i as usize][s_pos as usize - 1],
                t_p[i as usize][t_pos as usize - 1],
            );
            blocking.push(id);
            blocking_rows.push(blocking_route(
                &s_p[i as usize],
                s_pos as usize - 1,
                spine[i as usize],
                &t_p[i as usize],
                t_pos as usize - 1,
                ell,
            ));
        }
    }

    let instance = Instance::new(graph, agents, ell);

    // Schedules.
    let len = ell as usize + 1;
    let mut rows_out: Vec<Vec<VertexId>> = vec![Vec::new(); instance.agent_count()];
    for (i, &id) in nu.iter().enumerate() {
        rows_out[id.index()] = variable_route(
            &p_yes[i],
            &gadget,
            (4 * (i as u32 + 1 - 1) + 2) as usize - 1,
            &q_yes[i],
            len,
        );
    }
    for (i, &id) in mu.iter().enumerate() {
        rows_out[id.index()] = variable_route(
            &p_no[i],
            &gadget,
            (4 * (i as u32 + 1)) as usize - 1,
            &q_no[i],
            len,
        );
    }
    for (i0, &id) in lambda.iter().enumerate() {
        let i = i0 as u32 + 1;
        let exceptions = [4 * (i - 1) + 3, 4 * i + 1];
        rows_out[id.index()] = red_route(&spine, &gadget[i as usize - 1], i as usize, n, &exceptions, 2, len);
    }
    for (i0, &id) in tau.iter().enumerate() {
        let i = i0 as u32 + 1;
        let g = (n + m + i) as usize;
        let exceptions = [4 * (i - 1) + 3, 4 * i + 1];
        rows_out[id.index()] = red_route(&spine, &gadget[g - 1], g, n, &exceptions, 1, len);
    }
    let mut literal_indices = Vec::new();
    for (j0, &id) in kappa.iter().enumerate() {
        let idxs = clause_indices(formula, j0);
        let g = (n + j0 as u32 + 1) as usize;
        rows_out[id.index()] = red_route(&spine, &gadget[g - 1], g, n, &idxs, 2, len);
        literal_indices.push(idxs);
    }
    {
        let mut row = vec![spine[gadget_count as usize]];
        row.resize(len, spine[gadget_count as usize + 1]);
        rows_out[intro.index()] = row;
    }
    for (&id, row) in blocking.iter().zip(blocking_rows) {
        rows_out[id.index()] = row;
    }

    let schedule = Schedule::new(rows_out).expect("rows are rectangular");
    let layout = HardnessLayout {
        n,
        m,
        ell,
        gadget_count,
        rows,
        gadget,
        s_h,
        t_h,
        spine,
        s_p,
        t_p,
        p_yes,
        p_no,
        q_yes,
        q_no,
        nu,
        mu,
        lambda,
        tau,
        kappa,
        intro,
        blocking,
        literal_indices,
        formula: formula.clone(),
    };
    let malfunction = (1, intro);
    Ok((instance, schedule, layout, malfunction))
}

/// Shortest-path route of a blocking agent: down its S path, across the
/// anchor, and up its T path, moving every turn and arriving exactly at `ell`.
fn blocking_route(
    s_path: &[VertexId],
    s_idx: usize,
    anchor: VertexId,
    t_path: &[VertexId],
    t_idx: usize,
    ell: u32,
) -> Vec<VertexId> {
    let mut row = Vec::with_capacity(ell as usize + 1);
    for tau in (0..=s_idx).rev() {
        row.push(s_path[tau]);
    }
    row.push(anchor);
    row.extend_from_slice(&t_path[..=t_idx]);
    debug_assert_eq!(row.len(), ell as usize + 1);
    row
}

/// Variable agent route: its entry path, one row across every gadget, its
/// exit path, and a final repeated turn on the terminal.
fn variable_route(
    entry: &[VertexId],
    gadgets: &[Vec<[VertexId; 3]>],
    row_idx: usize,
    exit: &[VertexId],
    len: usize,
) -> Vec<VertexId> {
    let mut row: Vec<VertexId> = entry.to_vec();
    for g in gadgets {
        row.extend_from_slice(&g[row_idx]);
    }
    row.extend_from_slice(exit);
    let last = *row.last().unwrap();
    row.resize(len, last);
    debug_assert_eq!(row.len(), len);
    row
}

/// Red agent route for gadget `g`: one spine step, then one gadget row per
/// turn on column 1, detouring to `detour_col` on the listed row indices, and
/// parking on the gadget's top anchor from turn 4n+3 on.
fn red_route(
    spine: &[VertexId],
    gadget: &[[VertexId; 3]],
    g: usize,
    n: u32,
    exceptions: &[u32],
    detour_col: usize,
    len: usize,
) -> Vec<VertexId> {
    let mut row = vec![spine[g - 1], spine[g]];
    for l in 2..=(4 * n + 3) {
        let col = if exceptions.contains(&l) { detour_col } else { 0 };
        row.push(gadget[l as usize - 2][col]);
    }
    let last = *row.last().unwrap();
    row.resize(len, last);
    row
}

/// The delay set of the forward direction: for each variable the chosen
/// variable agent delays in turn 1 together with every red agent (the stalled
/// spine), and each red agent then holds its parking vertex until the turn
/// the blocking agents release its gadget.
pub fn repair_from_assignment(
    layout: &HardnessLayout,
    assignment: &[bool],
) -> Vec<DelayEvent> {
    assert_eq!(assignment.len(), layout.n as usize, "assignment must be total");
    let n = layout.n;
    let m = layout.m;

    let mut first_turn: BTreeSet<AgentId> = BTreeSet::new();
    for &id in layout
        .lambda
        .iter()
        .chain(layout.tau.iter())
        .chain(layout.kappa.iter())
    {
        first_turn.insert(id);
    }
    for i in 1..=n as usize {
        let id = if assignment[i - 1] { layout.nu[i - 1] } else { layout.mu[i - 1] };
        first_turn.insert(id);
    }

    let mut holds: BTreeMap<u32, BTreeSet<AgentId>> = BTreeMap::new();
    let hold = |holds: &mut BTreeMap<u32, BTreeSet<AgentId>>, id: AgentId, from: u32, to: u32| {
        for turn in from..=to {
            holds.entry(turn).or_default().insert(id);
        }
    };

    for i in 1..=n {
        let id = layout.lambda[i as usize - 1];
        let release = 4 * n + 2 + 3 * i;
        if assignment[i as usize - 1] {
            // nu_i delayed: park on u^i_{4(i-1)+2,3}, reached in turn 4i.
            hold(&mut holds, id, 4 * i + 1, release);
        } else {
            // mu_i delayed: park on u^i_{4i,3}, reached in turn 4i+2.
            hold(&mut holds, id, 4 * i + 3, release);
        }
    }
    for i in 1..=n {
        let id = layout.tau[i as usize - 1];
        let release = 4 * n + 2 + 3 * (n + m + i) - 1;
        if assignment[i as usize - 1] {
            // mu_i undelayed vacates u_{4i,2}: wait below on u_{4i-1,1}.
            hold(&mut holds, id, 4 * i + 2, release);
        } else {
            // nu_i undelayed vacates u_{4(i-1)+2,2}: wait on u_{4(i-1)+1,1}.
            hold(&mut holds, id, 4 * i, release);
        }
    }
    for j in 1..=m {
        let id = layout.kappa[j as usize - 1];
        let release = 4 * n + 2 + 3 * (n + j);
        let clause = &layout.formula().clauses[j as usize - 1];
        let satisfied = clause
            .iter()
            .find(|lit| assignment[lit.var as usize - 1] == lit.positive);
        // With no satisfied literal the first vertex is picked anyway; the
        // undelayed variable agent then collides with the parked clause agent.
        let lit = satisfied.unwrap_or(&clause[0]);
        let val = if lit.positive { 4 * (lit.var - 1) + 3 } else { 4 * lit.var + 1 };
        hold(&mut holds, id, val + 2, release);
    }

    let mut events = vec![DelayEvent::voluntary(1, first_turn)];
    for (turn, agents) in holds {
        events.push(DelayEvent::voluntary(turn, agents));
    }
    events
}

/// Structural audit: degree bound, gadget edge families, blocking path
/// shapes, and the distance-equals-makespan property of every blocking agent.
/// Planarity is not checked.
pub fn check_hardness_structure(layout: &HardnessLayout, instance: &Instance) -> Vec<String> {
    let mut out = Vec::new();
    let g = &instance.graph;
    let n = layout.n;
    let m = layout.m;

    let max_deg = g.max_degree();
    if max_deg > 10 {
        out.push(format!("maximum degree {max_deg} exceeds 10"));
    }

    let mut need_edge = |a: VertexId, b: VertexId, what: &str| {
        if !g.has_edge(a, b) {
            out.push(format!("missing {what} edge {}-{}", g.label(a), g.label(b)));
        }
    };
    for j in 1..=layout.gadget_count {
        for p in 1..=layout.rows {
            need_edge(
                layout.gadget_vertex(j, p, 1),
                layout.gadget_vertex(j, p, 2),
                "row",
            );
            need_edge(
                layout.gadget_vertex(j, p, 2),
                layout.gadget_vertex(j, p, 3),
                "row",
            );
            if p < layout.rows {
                need_edge(
                    layout.gadget_vertex(j, p, 1),
                    layout.gadget_vertex(j, p + 1, 1),
                    "column-1",
                );
                need_edge(
                    layout.gadget_vertex(j, p, 3),
                    layout.gadget_vertex(j, p + 1, 3),
                    "column-3",
                );
            }
        }
        for q in 1..=2 * n {
            need_edge(
                layout.gadget_vertex(j, 2 * q - 1, 1),
                layout.gadget_vertex(j, 2 * q, 3),
                "cross",
            );
            need_edge(
                layout.gadget_vertex(j, 2 * q, 3),
                layout.gadget_vertex(j, 2 * q + 1, 1),
                "cross",
            );
            need_edge(
                layout.gadget_vertex(j, 2 * q - 1, 1),
                layout.gadget_vertex(j, 2 * q, 2),
                "middle",
            );
            need_edge(
                layout.gadget_vertex(j, 2 * q, 2),
                layout.gadget_vertex(j, 2 * q + 1, 1),
                "middle",
            );
        }
        if j < layout.gadget_count {
            for p in 1..=layout.rows - 1 {
                need_edge(
                    layout.gadget_vertex(j, p, 3),
                    layout.gadget_vertex(j + 1, p, 1),
                    "inter-gadget",
                );
            }
        }
    }

    let expect_h = (layout.ell + 1) as usize;
    let expect_p = (layout.ell + 2) as usize;
    let mut check_path = |path: &[VertexId], anchor: VertexId, expect: usize, what: String| {
        if path.len() != expect {
            out.push(format!("{what} has {} vertices, expected {expect}", path.len()));
        }
        if !g.has_edge(path[0], anchor) {
            out.push(format!("{what} not attached to {}", g.label(anchor)));
        }
        for pair in path.windows(2) {
            if !g.has_edge(pair[0], pair[1]) {
                out.push(format!("{what} broken between {} and {}", g.label(pair[0]), g.label(pair[1])));
                break;
            }
        }
    };
    for j in 1..=layout.gadget_count as usize {
        for p in 1..=(layout.rows - 1) as usize {
            let anchor = layout.gadget[j - 1][p - 1][0];
            check_path(&layout.s_h[j - 1][p - 1], anchor, expect_h, format!("g{j}_S{p}"));
            check_path(&layout.t_h[j - 1][p - 1], anchor, expect_h, format!("g{j}_T{p}"));
        }
    }
    for i in 1..=(layout.gadget_count + 1) as usize {
        let anchor = layout.spine[i - 1];
        check_path(&layout.s_p[i - 1], anchor, expect_p, format!("PS{i}"));
        check_path(&layout.t_p[i - 1], anchor, expect_p, format!("PT{i}"));
    }
    let last = layout.gadget_count;
    for i in 1..=n {
        let yes_row = 4 * (i - 1) + 2;
        let no_row = 4 * i;
        let i0 = i as usize - 1;
        let py = &layout.p_yes[i0];
        let pn = &layout.p_no[i0];
        if py.len() != (4 * n + 3) as usize || pn.len() != (4 * n + 3) as usize {
            out.push(format!("variable entry paths of x{i} have wrong length"));
        }
        if !g.has_edge(*py.last().unwrap(), layout.gadget_vertex(1, yes_row, 1))
            || !g.has_edge(*pn.last().unwrap(), layout.gadget_vertex(1, no_row, 1))
        {
            out.push(format!("variable entry paths of x{i} detached"));
        }
        let qy = &layout.q_yes[i0];
        let qn = &layout.q_no[i0];
        if qy.len() != (4 * n + 2) as usize || qn.len() != (4 * n + 2) as usize {
            out.push(format!("variable exit paths of x{i} have wrong length"));
        }
        if !g.has_edge(qy[0], layout.gadget_vertex(last, yes_row, 3))
            || !g.has_edge(qn[0], layout.gadget_vertex(last, no_row, 3))
        {
            out.push(format!("variable exit paths of x{i} detached"));
        }
    }

    for &id in &layout.blocking {
        let spec = instance.agent(id);
        let dist = g.bfs_distances(spec.source)[spec.target.index()];
        if dist != Some(layout.ell) {
            out.push(format!(
                "blocking agent {} at distance {:?}, expected {}",
                spec.label, dist, layout.ell
            ));
        }
    }

    let gc = layout.gadget_count as u64;
    let expected_agents = (4 * n + m + 1) as u64
        + 3 * gc * (gc + 1) / 2
        + (4 * n) as u64 * gc
        + (10 * n + 3 * m) as u64 * gc;
    if instance.agent_count() as u64 != expected_agents {
        out.push(format!(
            "agent count {} differs from formula value {expected_agents}",
            instance.agent_count()
        ));
    }
    out
}

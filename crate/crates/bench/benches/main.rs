use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use mapfma_core::adversary::{worst_case_search, MalfunctionPlan, SearchCaps};
use mapfma_core::engine::{run, Protocol, RunConfig, ScriptedArbiter};
use mapfma_core::gen::{
    build_hardness_instance, gen_fig1, gen_fig2, gen_grid, repair_from_assignment, CnfFormula, Lit,
};
use mapfma_core::model::{apply_delay_sequence, check_feasible, DelayEvent};
use mapfma_core::solver::{solve_optimal, SolverLimits};

fn bench_solver(c: &mut Criterion) {
    let instance = gen_grid(3, 3, 3, 7, 6).unwrap();
    c.bench_function("solve_3x3_grid_3_agents", |b| {
        b.iter(|| solve_optimal(&instance, 6, &SolverLimits::default()).unwrap())
    });
}

fn bench_protocols(c: &mut Criterion) {
    let (instance, schedule) = gen_fig2();
    let a1 = instance.agent_by_label("a1").unwrap();
    let plan = MalfunctionPlan::scripted(&[(4, a1)], &instance).unwrap();
    for protocol in [Protocol::Cbm, Protocol::Ccbm] {
        c.bench_function(&format!("fig2_{protocol}_one_malfunction"), |b| {
            b.iter_batched(
                ScriptedArbiter::new,
                |mut arbiter| {
                    run(
                        &instance,
                        &schedule,
                        &plan,
                        &RunConfig::new(protocol),
                        &mut arbiter,
                    )
                    .unwrap()
                },
                BatchSize::SmallInput,
            )
        });
    }
}

fn bench_worst_case(c: &mut Criterion) {
    let (instance, schedule) = gen_fig1();
    let config = RunConfig::new(Protocol::NoComm);
    c.bench_function("fig1_nocomm_worst_case_k1", |b| {
        b.iter(|| worst_case_search(&instance, &schedule, &config, 1, &SearchCaps::default()))
    });
}

fn bench_hardness(c: &mut Criterion) {
    let formula = CnfFormula::new(
        2,
        vec![
            [Lit::pos(1), Lit::pos(2), Lit::pos(2)],
            [Lit::neg(1), Lit::neg(2), Lit::neg(2)],
        ],
    )
    .unwrap();
    c.bench_function("hardness_build_n2_m2", |b| {
        b.iter(|| build_hardness_instance(&formula).unwrap())
    });

    let (instance, schedule, layout, (turn, agent)) = build_hardness_instance(&formula).unwrap();
    let assignment = layout
        .formula()
        .exhaustive_satisfying_assignment()
        .unwrap()
        .unwrap();
    c.bench_function("hardness_repair_fold_n2_m2", |b| {
        b.iter(|| {
            let mut events = vec![DelayEvent::forced(turn, [agent])];
            events.extend(repair_from_assignment(&layout, &assignment));
            let repaired = apply_delay_sequence(&schedule, &events).unwrap();
            check_feasible(&instance, &repaired).unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_solver,
    bench_protocols,
    bench_worst_case,
    bench_hardness
);
criterion_main!(benches);

//! `mapfma`: generate, solve, simulate, attack, and audit schedules for
//! multiagent path finding with malfunctioning agents.
//!
//! Exit status: 0 on success, 1 on a domain failure (infeasible schedule,
//! deadlock, failed verification), 2 on usage or parse errors.

mod formats;
mod spacetime;
mod tracefile;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mapfma_core::adversary::{
    random_plan, worst_case_search, MalfunctionPlan, SearchCaps, TieBreakPolicy,
};
use mapfma_core::engine::{run, Protocol, RunConfig, RunResult, ScriptedArbiter};
use mapfma_core::gen::{
    build_hardness_instance, check_hardness_structure, gen_fig1, gen_fig2, gen_grid, parse_dimacs,
    repair_from_assignment,
};
use mapfma_core::model::{
    apply_delay_sequence, check_feasible, validate_instance, DelayEvent, FeasibilityVerdict,
    Instance, Schedule,
};
use mapfma_core::solver::{
    solve_optimal, verify_optimal_witness, SolveOutcome, SolverLimits, WitnessVerdict,
};

use formats::{
    parse_assignment, parse_instance, parse_plan_spec, parse_priority_spec, parse_schedule,
    write_delays, write_instance, write_plan_spec, write_schedule,
};
use tracefile::{first_divergence, instance_hash, parse_header, render_trace, TraceHeader};

#[derive(Parser)]
#[command(name = "mapfma", version, about = "Multiagent path finding with malfunctioning agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance: fig1, fig2, or a seeded random grid.
    Gen(GenArgs),
    /// Exact minimum-makespan schedule by joint-configuration search.
    Solve(SolveArgs),
    /// Execute a schedule under a malfunction plan with a recovery protocol.
    Simulate(SimulateArgs),
    /// Exhaustive worst-case adversary search.
    Worstcase(WorstcaseArgs),
    /// Check a schedule (feasibility, optimality witness) or replay a trace.
    Verify(VerifyArgs),
    /// Build the 3-SAT hardness instance for a DIMACS formula.
    SatReduce(SatReduceArgs),
    /// Compute and apply the assignment-driven delay repair.
    SatRepair(SatRepairArgs),
}

#[derive(Args)]
struct GenArgs {
    /// fig1 | fig2 | grid
    what: String,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Horizon cap for the embedded solve when generating grids.
    #[arg(long, default_value_t = 6)]
    cap: u32,
    /// Where to write the instance file.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Where to write the initial schedule, if the generator has one.
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 64)]
    cap: u32,
    /// Joint configuration bound guard.
    #[arg(long, default_value_t = 10_000_000)]
    limit: u64,
    #[arg(long)]
    schedule_out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long)]
    protocol: Protocol,
    /// Malfunction plan, comma-separated `turn:agent` (`-` for none).
    #[arg(long, default_value = "-")]
    plan: String,
    /// Draw a k-event random plan from --seed instead of --plan.
    #[arg(long)]
    random_k: Option<usize>,
    #[arg(long, default_value = "lowest-id")]
    policy: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// No-communication priority script, comma-separated `turn:vertex=agent`.
    #[arg(long, default_value = "-")]
    priority: String,
    #[arg(long)]
    budget: Option<u32>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    spacetime: Option<PathBuf>,
}

#[derive(Args)]
struct WorstcaseArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long)]
    protocol: Protocol,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "lowest-id")]
    policy: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    max_mu: u32,
    #[arg(long, default_value_t = 10)]
    max_agents: usize,
    #[arg(long, default_value_t = 3)]
    max_k: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    /// Re-execute this trace file and compare byte for byte.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Malfunction events (`turn:agent,...`) folded in before checking.
    #[arg(long, default_value = "-")]
    malfunction: String,
    /// Delay-event file folded into the schedule before checking.
    #[arg(long)]
    delays: Option<PathBuf>,
}

#[derive(Args)]
struct SatReduceArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Run the structural audit after generating.
    #[arg(long)]
    audit: bool,
}

#[derive(Args)]
struct SatRepairArgs {
    #[arg(long)]
    cnf: PathBuf,
    /// Truth value per variable, e.g. `10` for x1=true, x2=false.
    #[arg(long)]
    assignment: Option<String>,
    /// Search for a satisfying assignment by exhaustive enumeration.
    #[arg(long)]
    find_assignment: bool,
    #[arg(long)]
    repair_out: Option<PathBuf>,
    #[arg(long)]
    schedule_out: Option<PathBuf>,
}

/// Usage/parse failures exit 2; everything else reports and exits 0 or 1.
enum Failure {
    Usage(String),
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Worstcase(args) => cmd_worstcase(args),
        Command::Verify(args) => cmd_verify(args),
        Command::SatReduce(args) => cmd_sat_reduce(args),
        Command::SatRepair(args) => cmd_sat_repair(args),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read_file(path)?;
    parse_instance(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_schedule(path: &Path, instance: &Instance) -> Result<Schedule, Failure> {
    let text = read_file(path)?;
    parse_schedule(&text, instance)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_policy(spec: &str, seed: u64) -> Result<TieBreakPolicy, Failure> {
    if spec == "seeded-random" {
        return Ok(TieBreakPolicy::SeededRandom(seed));
    }
    spec.parse().map_err(Failure::Usage)
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let (instance, schedule) = match args.what.as_str() {
        "fig1" => {
            let (i, s) = gen_fig1();
            (i, Some(s))
        }
        "fig2" => {
            let (i, s) = gen_fig2();
            (i, Some(s))
        }
        "grid" => {
            let (rows, cols, agents) = match (args.rows, args.cols, args.agents) {
                (Some(r), Some(c), Some(a)) => (r, c, a),
                _ => {
                    return Err(Failure::Usage(
                        "grid generation needs --rows, --cols and --agents".into(),
                    ))
                }
            };
            match gen_grid(rows, cols, agents, args.seed, args.cap) {
                Ok(instance) => {
                    let schedule = match solve_optimal(&instance, args.cap, &SolverLimits::default())
                    {
                        Ok(SolveOutcome::Solved(s)) => Some(s),
                        _ => None,
                    };
                    (instance, schedule)
                }
                Err(e) => {
                    println!("generation failed: {e}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown generator `{other}` (expected fig1, fig2, grid)"
            )))
        }
    };
    if let Some(path) = &args.instance {
        write_file(path, &write_instance(&instance))?;
    }
    if let (Some(path), Some(schedule)) = (&args.schedule, &schedule) {
        write_file(path, &write_schedule(schedule, &instance))?;
    }
    println!(
        "generated {}: {} vertices, {} agents, makespan {}",
        args.what,
        instance.graph.vertex_count(),
        instance.agent_count(),
        instance.makespan_ell
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let violations = validate_instance(&instance);
    if !violations.is_empty() {
        for v in violations {
            println!("invalid instance: {v}");
        }
        return Ok(ExitCode::from(1));
    }
    let limits = SolverLimits { max_joint_bound: args.limit };
    match solve_optimal(&instance, args.cap, &limits) {
        Ok(SolveOutcome::Solved(schedule)) => {
            println!("makespan {}", schedule.length_mu());
            if let Some(path) = &args.schedule_out {
                write_file(path, &write_schedule(&schedule, &instance))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Ok(SolveOutcome::NoneWithinCap) => {
            println!("none within cap {}", args.cap);
            Ok(ExitCode::from(1))
        }
        Err(e) => {
            println!("solver refused: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let schedule = load_schedule(&args.schedule, &instance)?;
    let plan = if let Some(k) = args.random_k {
        random_plan(&instance, &schedule, k, args.seed)
    } else {
        let events = parse_plan_spec(&args.plan, &instance).map_err(Failure::Usage)?;
        MalfunctionPlan::scripted(&events, &instance)
            .map_err(|e| Failure::Usage(format!("bad plan: {e}")))?
    };
    let priorities = parse_priority_spec(&args.priority, &instance).map_err(Failure::Usage)?;
    let policy = parse_policy(&args.policy, args.seed)?;

    let mut config = RunConfig::new(args.protocol).with_policy(policy.clone());
    config.budget = args.budget;
    let mut arbiter = ScriptedArbiter::with_script(priorities.iter().copied());
    let result = match run(&instance, &schedule, &plan, &config, &mut arbiter) {
        Ok(result) => result,
        Err(e) => {
            println!("simulation rejected: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    report_run(&instance, &result);
    let header = TraceHeader {
        instance: &instance,
        protocol: args.protocol,
        policy: &policy,
        plan: &plan,
        priorities: &priorities,
        budget: args.budget,
    };
    if let Some(path) = &args.trace {
        write_file(path, &render_trace(&header, &result))?;
    }
    if let Some(path) = &args.spacetime {
        write_file(path, &spacetime::emit_spacetime(&instance, &result))?;
    }
    match result.outcome {
        mapfma_core::engine::Outcome::Completed => Ok(ExitCode::SUCCESS),
        _ => Ok(ExitCode::from(1)),
    }
}

fn report_run(instance: &Instance, result: &RunResult) {
    println!("outcome {}", result.outcome);
    println!("makespan {}", result.makespan);
    let arrivals: Vec<String> = instance
        .agents
        .iter()
        .map(|spec| format!("{}={}", spec.label, result.arrival_turn(spec.id)))
        .collect();
    println!("arrivals {}", arrivals.join(" "));
    let delays: u32 = result.delay_counts.iter().sum();
    println!("delays {delays}");
}

fn cmd_worstcase(args: WorstcaseArgs) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let schedule = load_schedule(&args.schedule, &instance)?;
    let policy = parse_policy(&args.policy, args.seed)?;
    let config = RunConfig::new(args.protocol).with_policy(policy);
    let caps = SearchCaps {
        max_mu: args.max_mu,
        max_agents: args.max_agents,
        max_k: args.max_k,
    };
    match worst_case_search(&instance, &schedule, &config, args.k, &caps) {
        Ok(worst) => {
            println!("worst value {}", worst.value);
            println!("worst plan {}", write_plan_spec(worst.plan.events(), &instance));
            println!(
                "worst choices {}",
                formats::write_priority_spec(&worst.choices, &instance)
            );
            println!("worst outcome {}", worst.witness.outcome);
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("search refused: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let mut schedule = load_schedule(&args.schedule, &instance)?;

    // Optional fold of a malfunction plus a repair before checking.
    let forced = parse_plan_spec(&args.malfunction, &instance).map_err(Failure::Usage)?;
    let mut events: Vec<DelayEvent> = forced
        .into_iter()
        .map(|(turn, agent)| DelayEvent::forced(turn, [agent]))
        .collect();
    if let Some(path) = &args.delays {
        let text = read_file(path)?;
        let repair = formats::parse_delays(&text, &instance)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        events.extend(repair);
    }
    if !events.is_empty() {
        events.sort_by_key(|e| e.turn);
        schedule = match apply_delay_sequence(&schedule, &events) {
            Ok(s) => s,
            Err(e) => {
                println!("delay fold failed: {e}");
                return Ok(ExitCode::from(1));
            }
        };
        println!("after delays: makespan {}", schedule.length_mu());
    }

    let Some(trace_path) = &args.trace else {
        return verify_schedule(&instance, &schedule);
    };

    let trace_text = read_file(trace_path)?;
    let header = parse_header(&trace_text).map_err(Failure::Usage)?;
    if header.instance_hash != instance_hash(&instance) {
        println!("instance hash mismatch");
        return Ok(ExitCode::from(1));
    }
    let events = parse_plan_spec(&header.plan_spec, &instance).map_err(Failure::Usage)?;
    let plan = MalfunctionPlan::scripted(&events, &instance)
        .map_err(|e| Failure::Usage(format!("bad plan in trace header: {e}")))?;
    let priorities =
        parse_priority_spec(&header.priorities_spec, &instance).map_err(Failure::Usage)?;
    let mut config = RunConfig::new(header.protocol).with_policy(header.policy.clone());
    config.budget = header.budget;
    let mut arbiter = ScriptedArbiter::with_script(priorities.iter().copied());
    let result = match run(&instance, &schedule, &plan, &config, &mut arbiter) {
        Ok(result) => result,
        Err(e) => {
            println!("replay rejected: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    let reference = TraceHeader {
        instance: &instance,
        protocol: header.protocol,
        policy: &header.policy,
        plan: &plan,
        priorities: &priorities,
        budget: header.budget,
    };
    let recomputed = render_trace(&reference, &result);
    match first_divergence(&recomputed, &trace_text) {
        None => {
            println!(
                "trace verified: {} turns, outcome {}",
                result.trace.len(),
                result.outcome
            );
            Ok(ExitCode::SUCCESS)
        }
        Some((turn, line)) => {
            println!("trace diverges at turn {turn}: {line}");
            Ok(ExitCode::from(1))
        }
    }
}

fn verify_schedule(instance: &Instance, schedule: &Schedule) -> CmdResult {
    let violations = validate_instance(instance);
    if !violations.is_empty() {
        for v in violations {
            println!("invalid instance: {v}");
        }
        return Ok(ExitCode::from(1));
    }
    match check_feasible(instance, schedule) {
        Ok(FeasibilityVerdict::Feasible) => {
            println!("feasible makespan {}", schedule.length_mu());
            match verify_optimal_witness(instance, schedule) {
                Ok(WitnessVerdict::OptimalByWitness) => println!("optimal-by-witness"),
                _ => println!("optimality undetermined"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Ok(FeasibilityVerdict::Violation(v)) => {
            println!("infeasible: {v}");
            Ok(ExitCode::from(1))
        }
        Err(e) => {
            println!("infeasible: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn load_formula(path: &Path) -> Result<mapfma_core::gen::CnfFormula, Failure> {
    let text = read_file(path)?;
    parse_dimacs(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_sat_reduce(args: SatReduceArgs) -> CmdResult {
    let formula = load_formula(&args.cnf)?;
    let (instance, schedule, layout, (turn, agent)) = match build_hardness_instance(&formula) {
        Ok(out) => out,
        Err(e) => {
            println!("reduction failed: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    println!(
        "reduction: n={} m={} ell={} vertices={} agents={}",
        layout.n,
        layout.m,
        layout.ell,
        instance.graph.vertex_count(),
        instance.agent_count()
    );
    println!("malfunction {}:{}", turn, instance.agents[agent.index()].label);
    if let Some(path) = &args.instance {
        write_file(path, &write_instance(&instance))?;
    }
    if let Some(path) = &args.schedule {
        write_file(path, &write_schedule(&schedule, &instance))?;
    }
    if args.audit {
        let violations = check_hardness_structure(&layout, &instance);
        if violations.is_empty() {
            println!("structure audit clean");
        } else {
            for v in violations {
                println!("structure violation: {v}");
            }
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sat_repair(args: SatRepairArgs) -> CmdResult {
    let formula = load_formula(&args.cnf)?;
    let assignment = match (&args.assignment, args.find_assignment) {
        (Some(bits), _) => parse_assignment(bits, formula.num_vars).map_err(Failure::Usage)?,
        (None, true) => match formula.exhaustive_satisfying_assignment() {
            Ok(Some(assignment)) => assignment,
            Ok(None) => {
                println!("formula is unsatisfiable");
                return Ok(ExitCode::from(1));
            }
            Err(e) => return Err(Failure::Usage(e.to_string())),
        },
        (None, false) => {
            return Err(Failure::Usage(
                "use --assignment <bits> or --find-assignment".into(),
            ))
        }
    };
    let (instance, schedule, layout, (turn, agent)) = match build_hardness_instance(&formula) {
        Ok(out) => out,
        Err(e) => {
            println!("reduction failed: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    let bits: String = assignment.iter().map(|&b| if b { '1' } else { '0' }).collect();
    println!("assignment {bits}");
    println!("malfunction {}:{}", turn, instance.agents[agent.index()].label);
    let repair = repair_from_assignment(&layout, &assignment);
    if let Some(path) = &args.repair_out {
        write_file(path, &write_delays(&repair, &instance))?;
    }
    let mut events = vec![DelayEvent::forced(turn, [agent])];
    events.extend(repair.iter().cloned());
    let repaired = match apply_delay_sequence(&schedule, &events) {
        Ok(repaired) => repaired,
        Err(e) => {
            println!("repair fold failed: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    if let Some(path) = &args.schedule_out {
        write_file(path, &write_schedule(&repaired, &instance))?;
    }
    println!("repaired makespan {}", repaired.length_mu());
    match check_feasible(&instance, &repaired) {
        Ok(FeasibilityVerdict::Feasible) if repaired.length_mu() == layout.ell => {
            println!("repair feasible at makespan {}", layout.ell);
            Ok(ExitCode::SUCCESS)
        }
        Ok(FeasibilityVerdict::Feasible) => {
            println!("repair feasible but exceeds makespan {}", layout.ell);
            Ok(ExitCode::from(1))
        }
        Ok(FeasibilityVerdict::Violation(v)) => {
            println!("repair infeasible: {v}");
            Ok(ExitCode::from(1))
        }
        Err(e) => {
            println!("repair infeasible: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

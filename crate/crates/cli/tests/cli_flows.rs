//! End-to-end command flows beyond the acceptance criteria: exit codes,
//! tamper detection, the repair pipeline through files, diagrams.

use std::path::Path;
use std::process::Command;

struct CliRun {
    stdout: String,
    code: i32,
}

fn mapfma(dir: &Path, args: &[&str]) -> CliRun {
    let output = Command::new(env!("CARGO_BIN_EXE_mapfma"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    CliRun {
        stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
        code: output.status.code().unwrap_or(-1),
    }
}

#[test]
fn unknown_subcommand_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let run = mapfma(dir.path(), &["frobnicate"]);
    assert_eq!(run.code, 2);
}

#[test]
fn missing_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let run = mapfma(dir.path(), &["solve", "--instance", "missing.inst"]);
    assert_eq!(run.code, 2);
}

#[test]
fn tampered_trace_reports_first_divergence_turn() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    mapfma(d, &["gen", "fig1", "--instance", "i", "--schedule", "s"]);
    mapfma(
        d,
        &["simulate", "--instance", "i", "--schedule", "s", "--protocol", "cbm",
          "--plan", "1:a2", "--trace", "t"],
    );
    let verify = mapfma(d, &["verify", "--instance", "i", "--schedule", "s", "--trace", "t"]);
    assert_eq!(verify.code, 0, "{}", verify.stdout);
    assert!(verify.stdout.contains("trace verified"));

    let text = std::fs::read_to_string(d.join("t")).unwrap();
    let tampered = text.replace("T3 A a1 move u2", "T3 A a1 stay");
    std::fs::write(d.join("t2"), tampered).unwrap();
    let verify = mapfma(d, &["verify", "--instance", "i", "--schedule", "s", "--trace", "t2"]);
    assert_eq!(verify.code, 1, "{}", verify.stdout);
    assert!(verify.stdout.contains("diverges at turn 3"), "{}", verify.stdout);
}

#[test]
fn trace_header_pins_the_run_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    mapfma(d, &["gen", "fig2", "--instance", "i", "--schedule", "s"]);
    mapfma(
        d,
        &["simulate", "--instance", "i", "--schedule", "s", "--protocol", "nocomm",
          "--plan", "4:a1", "--priority", "7:c1=b1_1,7:c2=b1_2,7:c3=b1_3", "--trace", "t"],
    );
    let text = std::fs::read_to_string(d.join("t")).unwrap();
    assert!(text.starts_with("# mapfma trace v1\n"));
    assert!(text.contains("\nprotocol nocomm\n"));
    assert!(text.contains("\nplan 4:a1\n"));
    assert!(text.contains("\npriorities 7:c1=b1_1,7:c2=b1_2,7:c3=b1_3\n"));
    assert!(text.ends_with("end completed makespan 11\n"));
    let verify = mapfma(d, &["verify", "--instance", "i", "--schedule", "s", "--trace", "t"]);
    assert_eq!(verify.code, 0, "{}", verify.stdout);
}

#[test]
fn repair_pipeline_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("f.cnf"), "p cnf 2 2\n1 2 2 0\n-1 -2 -2 0\n").unwrap();
    let reduce = mapfma(
        d,
        &["sat-reduce", "--cnf", "f.cnf", "--instance", "h.inst", "--schedule", "h.sched"],
    );
    assert_eq!(reduce.code, 0, "{}", reduce.stdout);
    let repair = mapfma(
        d,
        &["sat-repair", "--cnf", "f.cnf", "--find-assignment", "--repair-out", "h.repair"],
    );
    assert_eq!(repair.code, 0, "{}", repair.stdout);
    // Folding the malfunction plus the emitted repair into the written
    // schedule must verify feasible at the target makespan.
    let verify = mapfma(
        d,
        &["verify", "--instance", "h.inst", "--schedule", "h.sched",
          "--malfunction", "1:a", "--delays", "h.repair"],
    );
    assert_eq!(verify.code, 0, "{}", verify.stdout);
    assert!(verify.stdout.contains("after delays: makespan 39"), "{}", verify.stdout);
    assert!(verify.stdout.contains("feasible makespan 39"), "{}", verify.stdout);
}

#[test]
fn solve_writes_a_schedule_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    mapfma(
        d,
        &["gen", "grid", "--rows", "3", "--cols", "3", "--agents", "2", "--seed", "7",
          "--instance", "g.inst"],
    );
    let solve = mapfma(d, &["solve", "--instance", "g.inst", "--cap", "6", "--schedule-out", "g.sched"]);
    assert_eq!(solve.code, 0, "{}", solve.stdout);
    let verify = mapfma(d, &["verify", "--instance", "g.inst", "--schedule", "g.sched"]);
    assert_eq!(verify.code, 0, "{}", verify.stdout);
    assert!(verify.stdout.contains("feasible makespan"));
}

#[test]
fn fig2_spacetime_shows_the_late_arrival() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    mapfma(d, &["gen", "fig2", "--instance", "i", "--schedule", "s"]);
    mapfma(
        d,
        &["simulate", "--instance", "i", "--schedule", "s", "--protocol", "nocomm",
          "--plan", "4:a1", "--priority", "7:c1=b1_1,7:c2=b1_2,7:c3=b1_3",
          "--spacetime", "st"],
    );
    let diagram = std::fs::read_to_string(d.join("st")).unwrap();
    let a1_row = diagram
        .lines()
        .find(|l| l.starts_with("a1 "))
        .expect("a1 row present");
    let cells: Vec<&str> = a1_row.split_whitespace().collect();
    // Label column plus turns 0..=11; the terminal appears only in column 11.
    assert_eq!(cells.len(), 13);
    assert_eq!(cells[12], "q1_3");
    assert_ne!(cells[11].trim_end_matches(['*', '!']), "q1_3");
}

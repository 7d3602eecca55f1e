//! End-to-end tests driving the built binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn graph(name: &str) -> String {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.push("../../graphs");
    path.push(name);
    path.to_string_lossy().into_owned()
}

fn lpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn paths_lists_the_cycle_family() {
    let out = lpa(&[
        "paths",
        "--graph",
        &graph("reference.graph"),
        "--cycle",
        "d1d2d3d4",
        "--maxlen",
        "10",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().map(str::trim).collect();
    assert_eq!(lines, ["s1", "d4", "d3d4", "pd4", "d2d3d4"]);
}

#[test]
fn eval_reduces_a_ghost_product_to_a_vertex() {
    let out = lpa(&["eval", "--graph", &graph("reference.graph"), "d1' d1"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "s2");
}

#[test]
fn check_reports_the_census() {
    let out = lpa(&["check", "--graph", &graph("reference.graph")]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("disjoint-cycles: true"));
    assert!(text.contains("sinks: w"));
    assert!(text.contains("sources: ubar"));
    assert!(text.contains("cycles: d1d2d3d4, g1g2g3, l, w"));
}

#[test]
fn act_prepends_edges_and_shifts_the_tower() {
    let reference = graph("reference.graph");
    let base = ["act", "--graph", reference.as_str(), "--cycle", "d1d2d3d4"];
    let run = |actor: &str, element: &str| {
        let mut args = base.to_vec();
        args.push(actor);
        args.push(element);
        let out = lpa(&args);
        assert!(out.status.success());
        stdout_of(&out).trim().to_string()
    };
    assert_eq!(run("d3", "d4 @a1"), "d3d4 @a1");
    assert_eq!(run("d4' d3'", "d3d4 @a2"), "s1 @a2");
    assert_eq!(run("d1d2d3d4", "s1 @a2"), "s1 @a1 + s1 @a2");
    assert_eq!(run("d1", "s1 @a2"), "0");
}

#[test]
fn envelope_checks_pass_at_a_generous_horizon() {
    for (file, cycle, check) in [
        ("reference.graph", "g1g2g3", "ck"),
        ("reference.graph", "g1g2g3", "essential"),
        ("source_loop.graph", "g1g2g3", "extend"),
        ("source_loop.graph", "g1g2g3", "inverse"),
    ] {
        let out = lpa(&[
            "envelope",
            "--graph",
            &graph(file),
            "--cycle",
            cycle,
            "--poly",
            "x-1 over Q",
            "--horizon",
            "8",
            "--check",
            check,
        ]);
        assert!(out.status.success(), "{check} failed: {:?}", out);
        assert!(stdout_of(&out).contains(&format!("pass {check}")));
    }
}

#[test]
fn envelope_starvation_exits_with_the_horizon_code() {
    let out = lpa(&[
        "envelope",
        "--graph",
        &graph("reference.graph"),
        "--cycle",
        "g1g2g3",
        "--poly",
        "x-1 over Q",
        "--horizon",
        "2",
        "--check",
        "ck",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_emits_steps_and_the_embedding() {
    let out = lpa(&["reduce", "--graph", &graph("reference.graph"), "--emit-theta"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("eliminate source `ubar`"));
    assert!(text.contains("collapse cycle `d1d2d3d4`"));
    assert!(text.contains("theta(vbar) = s1"));
    assert!(text.contains("theta(dprime) = d1d2d3d4"));
    assert!(text.contains("theta(phi_b) = d1b"));
    assert!(text.contains("theta(phi_m) = d1d2m"));
}

#[test]
fn verify_exits_clean_on_a_fast_selection() {
    let out = lpa(&[
        "verify",
        "--select",
        "graph-census,cycle-power-oracle,source-fixpoint",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("3 passed, 0 failed, 0 insufficient"));
}

#[test]
fn verify_starved_horizon_exits_with_the_horizon_code() {
    let out = lpa(&[
        "verify",
        "--select",
        "ck-family",
        "--cycles",
        "g1g2g3",
        "--horizon",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_of(&out).contains("insufficient-horizon"));
}

#[test]
fn verify_sabotage_is_reported_as_failure() {
    let out = lpa(&["verify", "--select", "ck-family", "--sabotage", "wrap-drop"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).contains("FAIL"));
}

#[test]
fn verify_json_is_deterministic() {
    let args = [
        "--json",
        "verify",
        "--select",
        "graph-census,generator-identities,source-fixpoint",
        "--seed",
        "7",
    ];
    let first = lpa(&args);
    let second = lpa(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout_of(&first);
    assert!(text.contains("\"seed\": 7"));
    assert!(text.contains("\"status\": \"pass\""));
}

#[test]
fn usage_errors_use_the_usage_exit_code() {
    assert_eq!(lpa(&["bogus"]).status.code(), Some(64));
    assert_eq!(lpa(&["verify", "--select", "no-such-check"]).status.code(), Some(64));
    assert_eq!(
        lpa(&["eval", "--graph", &graph("reference.graph"), "zz' + 1"]).status.code(),
        Some(64)
    );
    assert_eq!(lpa(&["check", "--graph", "/nonexistent.graph"]).status.code(), Some(64));
}

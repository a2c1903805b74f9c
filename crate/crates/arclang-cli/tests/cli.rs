//! End-to-end checks of the `arc` binary: exit codes, stream separation, and
//! byte-stable payloads.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

fn coffee(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../arclang/tests/fixtures/coffee")
        .join(rel)
}

fn golden(rel: &str) -> String {
    std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(rel),
    )
    .unwrap()
}

fn coffee_files() -> [PathBuf; 3] {
    [
        coffee("machine.arc"),
        coffee("cpu.arc"),
        coffee("stubs.arc"),
    ]
}

fn arc_cmd(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_arc"));
    for a in args {
        cmd.arg(a.as_ref());
    }
    cmd.output().expect("spawn arc")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn check_clean_model_is_silent() {
    let [m, c, s] = coffee_files();
    let out = arc_cmd(&[&"check", &m, &c, &s]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(out.stdout.is_empty());
    assert!(out.stderr.is_empty());
}

#[test]
fn check_reports_unconnected_ports_as_warnings_only() {
    let out = arc_cmd(&[
        &"check",
        &coffee("machine_noauto.arc"),
        &coffee("cpu.arc"),
        &coffee("stubs.arc"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let stderr = stderr_of(&out);
    let warnings: Vec<_> = stderr.lines().collect();
    assert_eq!(warnings.len(), 8, "{stderr}");
    assert!(warnings.iter().all(|l| l.starts_with("warning W0301 ")));
}

#[test]
fn check_with_explicit_root() {
    let [m, c, s] = coffee_files();
    let out = arc_cmd(&[&"check", &m, &c, &s, &"--root", &"CoffeeMachine"]);
    assert_eq!(out.status.code(), Some(0));

    let out = arc_cmd(&[&"check", &m, &c, &s, &"--root", &"Nowhere"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("no component named `Nowhere`"));
}

#[test]
fn unreadable_file_is_a_usage_error() {
    let out = arc_cmd(&[&"check", &"/no/such/file.arc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("cannot read"));
    assert!(out.stdout.is_empty());
}

#[test]
fn parse_errors_exit_one_and_stay_off_stdout() {
    let out = arc_cmd(&[&"check", &fixture("errors/e0103.arc")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(stderr_of(&out).contains("error E0103 "));
}

#[test]
fn graph_json_is_stable_and_matches_golden() {
    let [m, c, s] = coffee_files();
    let args: [&dyn AsRef<std::ffi::OsStr>; 7] = [
        &"graph",
        &m,
        &c,
        &s,
        &"--root",
        &"CoffeeMachine",
        &"--format=json",
    ];
    let first = arc_cmd(&args);
    let second = arc_cmd(&args);
    assert_eq!(first.status.code(), Some(0));
    assert!(first.stderr.is_empty());
    assert_eq!(
        first.stdout, second.stdout,
        "graph output must be deterministic"
    );
    assert_eq!(stdout_of(&first), golden("coffee_graph.json"));

    let graph: serde_json::Value = serde_json::from_str(&stdout_of(&first)).unwrap();
    assert_eq!(graph["root"], "CoffeeMachine");
    let connectors = graph["connectors"].as_array().unwrap();
    assert_eq!(connectors.len(), 6);
    let count = |origin: &str| connectors.iter().filter(|c| c["origin"] == origin).count();
    assert_eq!(count("auto"), 4);
    assert_eq!(count("inline"), 1);
    assert_eq!(count("explicit"), 1);
}

#[test]
fn graph_dot_matches_golden() {
    let [m, c, s] = coffee_files();
    let out = arc_cmd(&[&"graph", &m, &c, &s, &"--root", &"CoffeeMachine"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out), golden("coffee_graph.dot"));
}

#[test]
fn graph_unknown_root_is_usage_error() {
    let [m, c, s] = coffee_files();
    let out = arc_cmd(&[&"graph", &m, &c, &s, &"--root", &"Mystery"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn run_full_trace_is_stable_and_matches_golden() {
    let [m, c, s] = coffee_files();
    let stim = coffee("milk.stim");
    let args: [&dyn AsRef<std::ffi::OsStr>; 10] = [
        &"run",
        &m,
        &c,
        &s,
        &"--root",
        &"CoffeeMachine",
        &"--stimuli",
        &stim,
        &"--trace",
        &"full",
    ];
    let first = arc_cmd(&args);
    let second = arc_cmd(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr_of(&first));
    assert!(first.stderr.is_empty());
    assert_eq!(first.stdout, second.stdout, "trace must be deterministic");
    assert_eq!(stdout_of(&first), golden("coffee_trace_full.jsonl"));
}

#[test]
fn run_defaults_to_boundary_trace() {
    let [m, c, s] = coffee_files();
    let stim = coffee("milk.stim");
    let out = arc_cmd(&[
        &"run",
        &m,
        &c,
        &s,
        &"--root",
        &"CoffeeMachine",
        &"--stimuli",
        &stim,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert_eq!(text, golden("coffee_trace_boundary.jsonl"));
    assert!(text.lines().all(|l| l.contains("\"inject\"")));
}

#[test]
fn divergence_exits_three_with_partial_trace_flushed() {
    let out = arc_cmd(&[
        &"run",
        &fixture("runtime/echo_loop.arc"),
        &"--root",
        &"EchoLoop",
        &"--stimuli",
        &fixture("runtime/kick.stim"),
        &"--max-steps",
        &"25",
        &"--trace",
        &"full",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_of(&out).contains("diverged after 25 steps"));
    let fires = stdout_of(&out)
        .lines()
        .filter(|l| l.contains("\"fire\""))
        .count();
    assert_eq!(fires, 25, "the flushed trace covers the whole budget");
}

#[test]
fn runtime_fault_exits_three_with_partial_trace_flushed() {
    let out = arc_cmd(&[
        &"run",
        &fixture("runtime/div0.arc"),
        &"--root",
        &"Divider",
        &"--stimuli",
        &fixture("runtime/div0.stim"),
        &"--trace",
        &"full",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_of(&out).contains("division by zero"));
    let kinds: Vec<String> = stdout_of(&out)
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["kind"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(kinds, ["inject", "deliver", "fire"]);
}

#[test]
fn malformed_stimulus_file_exits_one() {
    let out = arc_cmd(&[
        &"run",
        &fixture("runtime/div0.arc"),
        &"--root",
        &"Divider",
        &"--stimuli",
        &fixture("errors/e0104.stim"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("error E0104 "));
    assert!(out.stdout.is_empty());
}

#[test]
fn mismatched_stimuli_are_usage_errors() {
    // Unknown in-port.
    let out = arc_cmd(&[
        &"run",
        &fixture("runtime/div0.arc"),
        &"--root",
        &"Divider",
        &"--stimuli",
        &fixture("runtime/kick.stim"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("has no in-port named `kick`"));

    // Right port, wrong value type.
    let out = arc_cmd(&[
        &"run",
        &fixture("runtime/div0.arc"),
        &"--root",
        &"Divider",
        &"--stimuli",
        &fixture("runtime/wrong_type.stim"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("error E0209 "));
}

#[test]
fn usage_problems_exit_two() {
    let out = arc_cmd(&[]);
    assert_eq!(out.status.code(), Some(2));

    let out = arc_cmd(&[&"graph", &coffee("machine.arc")]);
    assert_eq!(out.status.code(), Some(2), "--root is required for graph");

    let out = arc_cmd(&[&"check"]);
    assert_eq!(out.status.code(), Some(2), "at least one file is required");
}

#[test]
fn warnings_accompany_payload_without_polluting_stdout() {
    let out = arc_cmd(&[
        &"graph",
        &fixture("errors/w0301.arc"),
        &"--root",
        &"Quiet",
        &"--format=json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr_of(&out).contains("warning W0301 "));
    let graph: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(graph["root"], "Quiet");
}

#[test]
fn error_diagnostics_keep_stdout_empty_for_graph_and_run() {
    let out = arc_cmd(&[&"graph", &fixture("errors/e0306.arc"), &"--root", &"Board"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(stderr_of(&out).contains("error E0306 "));
}

#[test]
fn readme_example_behaves_as_documented() {
    // The README embeds this fixture and its outputs verbatim; keep them honest.
    let house = fixture("readme/house.arc");
    let stim = fixture("readme/heat.stim");

    let out = arc_cmd(&[&"check", &house]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(out.stderr.is_empty());

    let out = arc_cmd(&[&"run", &house, &"--root", &"House", &"--stimuli", &stim]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert_eq!(
        stdout_of(&out),
        concat!(
            r#"{"step":0,"kind":"inject","instance":[],"port":"reading","value":21}"#,
            "\n",
            r#"{"step":2,"kind":"inject","instance":[],"port":"reading","value":35}"#,
            "\n",
            r#"{"step":4,"kind":"system_out","instance":[],"port":"alert","value":"too hot"}"#,
            "\n",
            r#"{"step":4,"kind":"inject","instance":[],"port":"reading","value":28}"#,
            "\n",
        )
    );

    let out = arc_cmd(&[
        &"run",
        &house,
        &"--root",
        &"House",
        &"--stimuli",
        &stim,
        &"--trace",
        &"full",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let full = stdout_of(&out);
    assert_eq!(full.lines().count(), 17);
    assert!(full.starts_with(concat!(
        r#"{"step":0,"kind":"inject","instance":[],"port":"reading","value":21}"#,
        "\n",
        r#"{"step":0,"kind":"deliver","instance":["controller"],"port":"reading","value":21}"#,
        "\n",
        r#"{"step":1,"kind":"fire","instance":["controller"],"port":"reading","value":21}"#,
        "\n",
        r#"{"step":1,"kind":"emit","instance":["controller"],"port":"level","value":21}"#,
        "\n",
        r#"{"step":1,"kind":"deliver","instance":["horn"],"port":"level","value":21}"#,
        "\n",
        r#"{"step":2,"kind":"fire","instance":["horn"],"port":"level","value":21}"#,
        "\n",
    )));

    let out = arc_cmd(&[&"graph", &house, &"--root", &"House", &"--format", &"json"]);
    assert_eq!(out.status.code(), Some(0));
    let graph: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let connectors = graph["connectors"].as_array().unwrap();
    assert_eq!(connectors.len(), 3);
    assert!(connectors.iter().all(|c| c["origin"] == "auto"));
}

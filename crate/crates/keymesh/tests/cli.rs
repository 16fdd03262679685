//! End-to-end checks of the `keymesh` binary: exit codes, output shapes,
//! the seed environment fallback, file output, and 1-based display.

use std::process::{Command, Output};

fn keymesh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keymesh"))
        .args(args)
        .env_remove("KEYMESH_SEED")
        .output()
        .expect("binary runs")
}

fn json_of(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn route_report_has_the_documented_shape() {
    let out = keymesh(&["route", "--n", "16", "--src", "0", "--dst", "11"]);
    let value = json_of(&out);
    assert_eq!(value["report"]["hops"], serde_json::json!([0, 12, 11]));
    assert_eq!(value["report"]["hop_count"], 2);
    assert_eq!(value["report"]["bound"], 2);
    assert_eq!(value["version"], "0.1.0");
    assert_eq!(value["seed"], 0);
    assert_eq!(value["params"]["n"], 16);
}

#[test]
fn verify_reproduces_the_headline_sizes() {
    let out = keymesh(&["verify", "--n", "1024"]);
    let value = json_of(&out);
    assert_eq!(value["report"]["bound"], 5);
    assert_eq!(value["report"]["bfs_diameter"], 5);
    assert_eq!(value["report"]["bound_holds"], true);
    assert_eq!(value["report"]["mismatch_count"], 0);
}

#[test]
fn send_round_trips_the_message() {
    let out = keymesh(&[
        "send", "--n", "16", "--src", "0", "--dst", "11", "--message", "hello",
    ]);
    let value = json_of(&out);
    assert_eq!(value["report"]["delivered_plaintext"], "hello");
    assert_eq!(value["report"]["key_ids"], serde_json::json!(["0-12", "11-12"]));
    assert_eq!(value["report"]["transmissions"], 2);
}

#[test]
fn capture_matches_the_resilience_numbers() {
    let out = keymesh(&["capture", "--n", "16", "--nodes", "0"]);
    let value = json_of(&out);
    assert_eq!(value["report"]["revealed_count"], 7);
    assert_eq!(value["report"]["fraction_compromised"], 0.125);
}

#[test]
fn seed_env_var_is_the_fallback() {
    let explicit = keymesh(&["topology", "--n", "8", "--seed", "77", "--include-key-ids"]);
    let via_env = Command::new(env!("CARGO_BIN_EXE_keymesh"))
        .args(["topology", "--n", "8", "--include-key-ids"])
        .env("KEYMESH_SEED", "77")
        .output()
        .expect("binary runs");
    assert_eq!(explicit.stdout, via_env.stdout);
    // An explicit flag still wins over the environment.
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_keymesh"))
        .args(["topology", "--n", "8", "--seed", "77", "--include-key-ids"])
        .env("KEYMESH_SEED", "1234")
        .output()
        .expect("binary runs");
    assert_eq!(explicit.stdout, flag_wins.stdout);
}

#[test]
fn out_flag_writes_the_payload_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("graph.json");
    let out = keymesh(&[
        "topology",
        "--n",
        "16",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["report"]["n"], 16);
    assert_eq!(written["report"]["edges"].as_array().unwrap().len(), 56);
}

#[test]
fn one_based_rendering_shifts_every_node_id() {
    let out = keymesh(&[
        "route", "--n", "16", "--src", "0", "--dst", "11", "--one-based",
    ]);
    let value = json_of(&out);
    assert_eq!(value["report"]["hops"], serde_json::json!([1, 13, 12]));
    assert_eq!(value["report"]["src"], 1);
    // Stored parameters keep the canonical 0-based ids.
    assert_eq!(value["params"]["src"], 0);
}

#[test]
fn sweep_csv_has_the_documented_columns() {
    let out = keymesh(&["sweep", "--n-list", "8,4", "--er-trials", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# keymesh "));
    assert!(lines.next().unwrap().contains("command=sweep seed=0"));
    assert_eq!(
        lines.next().unwrap(),
        "n,diameter,bound,avg_path,clustering_structured,clustering_er_mean,error"
    );
    let row8 = lines.next().unwrap();
    assert!(row8.starts_with("8,2,2,"));
    // Below the defined range the bound column stays empty.
    let row4 = lines.next().unwrap();
    assert!(row4.starts_with("4,1,,1,"));
}

#[test]
fn baseline_ring_summary_row() {
    let out = keymesh(&[
        "baseline", "--model", "ring", "--n", "64", "--trials", "2", "--summary",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let data = text.lines().last().unwrap();
    assert!(data.starts_with("ring,64,2,1,64,0"), "row was {data}");
}

#[test]
fn eg_baseline_requires_its_parameters() {
    let out = keymesh(&["baseline", "--model", "eg", "--n", "10", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("stderr carries a JSON error object");
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn auth_tampering_is_impossible_via_cli_but_bad_params_exit_2() {
    let out = keymesh(&["send", "--n", "16", "--src", "3", "--dst", "3", "--message", "x"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "same-node");
}

#[test]
fn spawned_runs_are_byte_identical() {
    let args = [
        "sweep", "--n-list", "8,16,32", "--seed", "4", "--er-trials", "4",
    ];
    let first = keymesh(&args);
    let second = keymesh(&args);
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

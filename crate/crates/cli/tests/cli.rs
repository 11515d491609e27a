use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipobisim"))
        .args(args)
        .env_remove("IPOBISIM_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn bisim_lazy_coincidence_exits_zero() {
    let out = run(&[
        "bisim", "K", "S(K K)(S K K)", "--order", "second", "--strategy", "lazy", "--labels",
        "finite", "--depth", "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "Equivalent");
    assert_eq!(v["depth"], 8);
    assert!(v["stats"]["wall_ms"].is_null());
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim(), "Equivalent(8)");
}

#[test]
fn bisim_first_order_cl_exits_one() {
    let out = run(&[
        "bisim", "K", "S(K K)(S K K)", "--calculus", "cl", "--order", "first", "--labels",
        "reactive", "--pool", "2", "--depth", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["trace"].as_array().unwrap().len(), 1);
}

#[test]
fn lts_of_a_bare_variable_has_five_lines() {
    let out = run(&[
        "lts", "?x", "--order", "second", "--strategy", "lazy", "--labels", "finite", "--depth",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    for l in lines {
        let v: Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["state"], "?x");
        assert_eq!(v["label"]["args"][0], "?y1");
    }
}

#[test]
fn translate_identity() {
    let out = run(&["translate", "\\x.x", "--dir", "lambda-to-cl"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["output"], "S K K");
    let back = run(&["translate", "K", "--dir", "cl-to-lambda"]);
    assert_eq!(stdout_json(&back)["output"], "\\x. \\y. x");
}

#[test]
fn reduce_reports_fuel_exhaustion() {
    let out = run(&["reduce", "(\\x. x x) (\\x. x x)", "--fuel", "50"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "fuel_exhausted");
    assert_eq!(v["steps"], 50);

    let out = run(&["reduce", "S K K K", "--calculus", "cl", "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"], "K");
    assert_eq!(v["trace"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(run(&["parse", "K'(?x"]).status.code(), Some(65));
    assert_eq!(run(&["reduce", "x y", "--calculus", "lambda"]).status.code(), Some(65));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(
        run(&["bisim", "K", "S", "--calculus", "cl", "--order", "second"]).status.code(),
        Some(64)
    );
}

#[test]
fn parse_echoes_canonical_form() {
    let out = run(&["parse", "S''(K,(?x))  K"]);
    assert_eq!(stdout_json(&out)["term"], "S''(K, ?x) K");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["prop", "congruence", "--samples", "10", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_ipobisim"))
            .args(args)
            .env("IPOBISIM_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(stdout_json(&env("9"))["seed"], 9);
    assert_eq!(env("nine").status.code(), Some(64));
}

#[test]
fn oracle_contextual_separates_identity_from_eta_expansion() {
    let out = run(&["oracle", "contextual", "\\x.x", "\\x y. x y", "--context-size", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["verdict"], "Distinguished");
}

#[test]
fn small_invariant_run() {
    let out = run(&[
        "--jobs", "1", "prop", "invariants", "--max-size", "4", "--open-size", "3",
        "--mgu-pairs", "200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["wall_ms"].is_null());
    assert!(v["properties"].as_array().unwrap().iter().all(|p| p["failures"] == 0));
}

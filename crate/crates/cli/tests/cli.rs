//! End-to-end tests of the binary: worked examples, the exit-code
//! contract (0 pass, 1 check failed, 2 invalid input), and byte-identical
//! JSON for identical invocations.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shuffle-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout parses as JSON")
}

#[test]
fn lyndon_examples() {
    let out = run(&["lyndon", "-s", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("aab abb"));
    assert!(stdout(&out).contains("phi 2"));

    let out = run(&["lyndon", "-s", "3", "--json"]);
    let v = json(&out);
    assert_eq!(v["words"], serde_json::json!(["aab", "abb"]));
    assert_eq!(v["count"], 2);
    assert_eq!(v["phi"], 2);
    assert_eq!(v["match"], true);

    let out = run(&["lyndon", "--alphabet", "1", "-s", "2", "--json"]);
    let v = json(&out);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["words"], serde_json::json!([]));
    assert_eq!(v["phi"], 0);

    let out = run(&["lyndon", "--alphabet", "2", "-s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("a b"));
}

#[test]
fn shuffle_examples() {
    let out = run(&["shuffle", "ab", "a"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "2*aab + aba");

    let out = run(&["shuffle", "a", "b"]);
    assert_eq!(stdout(&out).trim(), "ab + ba");

    // empty literal is the unit
    let out = run(&["shuffle", "a", ""]);
    assert_eq!(stdout(&out).trim(), "a");

    let out = run(&["shuffle", "2*ab + ba", "1", "--json"]);
    let v = json(&out);
    assert_eq!(v["product"], "2*ab + ba");
}

#[test]
fn invalid_input_exits_2() {
    assert_eq!(run(&["shuffle", "a$", "b"]).status.code(), Some(2));
    assert_eq!(run(&["lyndon", "--alphabet", "0", "-s", "2"]).status.code(), Some(2));
    assert_eq!(run(&["indec", "-s", "2", "-p", "6"]).status.code(), Some(2));
    assert_eq!(run(&["magnus", "a"]).status.code(), Some(2));
    assert_eq!(run(&["magnus", "a", "-w", "ab"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--profile", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    // cap too small to enumerate the group
    let out = run(&["unipotent", "--n", "3", "-s", "3", "-p", "3", "--cap", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn indec_reports() {
    let out = run(&["indec", "-s", "2", "-p", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["dim"], 1);
    assert_eq!(v["report"]["match"], true);
    assert_eq!(v["report"]["formula_applies"], true);

    // the mismatch at s = p is expected and not an error
    let out = run(&["indec", "--alphabet", "1", "-s", "5", "-p", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["dim"], 1);
    assert_eq!(v["report"]["phi"], "0");
    assert_eq!(v["report"]["match"], false);
    assert_eq!(v["report"]["formula_applies"], false);

    let out = run(&["indec", "--alphabet", "3", "-s", "4", "-p", "7", "--json"]);
    let v = json(&out);
    assert_eq!(v["report"]["dim"], 18);
    assert_eq!(v["report"]["match"], true);
}

#[test]
fn unipotent_report() {
    let out = run(&["unipotent", "--n", "2", "-s", "2", "-p", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["order"], 27);
    assert_eq!(v["report"]["layers"], serde_json::json!([27, 3, 1]));
    assert_eq!(v["report"]["pass"], true);
    assert_eq!(v["report"]["exponent_measured"], 3);
}

#[test]
fn magnus_series_and_matrix() {
    let out = run(&["magnus", "ab", "-q", "5", "-s", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let words: Vec<&str> = v["series"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["word"].as_str().unwrap())
        .collect();
    assert_eq!(words, ["", "a", "b", "ab"]);

    let out = run(&["magnus", "a", "-w", "ab", "--n", "2", "-p", "3", "--json"]);
    let v = json(&out);
    assert_eq!(v["rho"], serde_json::json!([[1, 1, 0], [0, 1, 0], [0, 0, 1]]));

    // a relator evaluates to the identity matrix
    let out = run(&["magnus", "aa'", "-w", "ab", "--n", "3", "-p", "2", "--json"]);
    let v = json(&out);
    assert_eq!(v["rho"], serde_json::json!([[1, 0, 0], [0, 1, 0], [0, 0, 1]]));
}

#[test]
fn verify_quick_passes_and_is_deterministic() {
    let first = run(&["verify", "--profile", "quick", "--json"]);
    assert_eq!(first.status.code(), Some(0));
    let v = json(&first);
    assert_eq!(v["pass"], true);
    assert_eq!(v["profile"], "quick");
    assert_eq!(v["seed"], 42);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 10);
    assert!(checks.iter().all(|c| c["pass"] == true));

    let second = run(&["verify", "--profile", "quick", "--json"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn json_outputs_are_byte_stable() {
    for args in [
        vec!["lyndon", "-s", "4", "--json"],
        vec!["shuffle", "ab", "ab", "--json"],
        vec!["indec", "-s", "2", "-p", "3", "--json"],
        vec!["magnus", "ab'a", "-q", "27", "-s", "3", "--json"],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn help_screens() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verify"));
    let out = run(&["magnus", "--help"]);
    assert_eq!(out.status.code(), Some(0));
}

//! End-to-end tests for the command-line surface: exit codes, record
//! output, determinism, and input validation.

use std::fs;
use std::path::Path;

use gramlab::cli;

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["gramlab"];
    argv.extend_from_slice(args);
    cli::run(argv)
}

fn strip_elapsed(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let mut cleaned = String::new();
        let mut rest = line;
        while let Some(pos) = rest.find("\"elapsed_us\":") {
            cleaned.push_str(&rest[..pos]);
            let tail = &rest[pos + "\"elapsed_us\":".len()..];
            let digits = tail.chars().take_while(|c| c.is_ascii_digit()).count();
            rest = &tail[digits..];
        }
        cleaned.push_str(rest);
        out.push_str(&cleaned);
        out.push('\n');
    }
    out
}

#[test]
fn integral_fixture_holds_and_writes_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("records.jsonl");
    let code = run(&[
        "integral",
        "--prop",
        "4.1",
        "--f",
        "x^2",
        "--g",
        "x",
        "--h",
        "1",
        "--rho",
        "1",
        "--interval",
        "0,1",
        "--m",
        "0.1",
        "--M",
        "2",
        "--panels",
        "32",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let record: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(record["verdict"], "holds");
    assert_eq!(record["form"], "thm21");
    assert_eq!(record["sync_verdict"], "not_synchronous");
    let chain = record["chain_values"].as_array().unwrap();
    assert_eq!(chain.len(), 4);
    let gap = chain[1].as_f64().unwrap();
    assert!((gap - 1.0 / 2160.0).abs() < 1e-12, "gap {gap}");
    let cond = record["condition_value"].as_f64().unwrap();
    assert!((cond - (1.9 / 12.0 - 4.0 / 45.0)).abs() < 1e-12);
}

#[test]
fn verify_extremal_input_chain() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("extremal.json");
    fs::write(
        &input,
        r#"{"x": [1, 1, 0], "y": [1, 0, 0], "z": [0, 0, 1], "a": 0, "A": 2}"#,
    )
    .unwrap();
    let out = dir.path().join("records.jsonl");
    let code = run(&[
        "verify",
        "--form",
        "thm21",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let record: serde_json::Value =
        serde_json::from_str(fs::read_to_string(&out).unwrap().trim()).unwrap();
    let chain: Vec<f64> = record["chain_values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(chain.len(), 4);
    assert_eq!(chain[0], 0.0);
    for v in &chain[1..] {
        assert!((v - 1.0).abs() < 1e-12, "chain {chain:?}");
    }
    assert_eq!(record["verdict"], "holds");
}

#[test]
fn verify_complex_entries_and_weights() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cplx.json");
    // x is the ball center ((a+A)/2) y, so the localization holds.
    fs::write(
        &input,
        r#"{"x": [[1,0.5], [0,0], [0,0]], "y": [[1,0], [0,0], [0,0]], "z": [[0,0], [0,0], [1,0]],
            "a": [0,0], "A": [2,1], "weights": [1.0, 2.0, 1.0]}"#,
    )
    .unwrap();
    let code = run(&[
        "verify",
        "--form",
        "gap114",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
}

#[test]
fn verify_off_hypothesis_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("far.json");
    fs::write(
        &input,
        r#"{"x": [20, 0, 0], "y": [1, 0, 0], "z": [0, 0, 1], "a": 0, "A": 2}"#,
    )
    .unwrap();
    let code = run(&[
        "verify",
        "--form",
        "thm21",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
}

#[test]
fn verify_rejects_mismatched_fields() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(
        &input,
        r#"{"x": [1, 1, 0], "y": [1, 0], "z": [0, 0, 1], "a": 0, "A": 2}"#,
    )
    .unwrap();
    assert_eq!(
        run(&[
            "verify",
            "--form",
            "thm21",
            "--input",
            input.to_str().unwrap()
        ]),
        2
    );

    fs::write(
        &input,
        r#"{"x": [1, 1, 0], "y": [1, 0, 0], "z": [0, 0, 1], "a": 0, "A": 2, "weights": [1, 2]}"#,
    )
    .unwrap();
    assert_eq!(
        run(&[
            "verify",
            "--form",
            "thm21",
            "--input",
            input.to_str().unwrap()
        ]),
        2
    );

    fs::write(&input, "not json").unwrap();
    assert_eq!(
        run(&[
            "verify",
            "--form",
            "thm21",
            "--input",
            input.to_str().unwrap()
        ]),
        2
    );
}

#[test]
fn axioms_small_dimension_is_fine() {
    assert_eq!(
        run(&["axioms", "--dim", "2", "--mode", "real", "--trials", "200"]),
        0
    );
    assert_eq!(
        run(&["axioms", "--dim", "2", "--mode", "complex", "--trials", "200"]),
        0
    );
}

#[test]
fn sharpness_needs_three_dimensions() {
    assert_eq!(
        run(&[
            "sharpness",
            "--form",
            "thm21",
            "--dim",
            "2",
            "--trials",
            "10"
        ]),
        2
    );
}

#[test]
fn sharpness_estimate_reaches_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.jsonl");
    let code = run(&[
        "sharpness",
        "--form",
        "thm21",
        "--dim",
        "4",
        "--trials",
        "200",
        "--epsilon-grid",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let est: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(est["record"], "sharpness");
    assert!((est["estimate"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    // five epsilon-grid records follow
    assert_eq!(lines.filter(|l| l.contains("epsilon-grid")).count(), 5);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["axioms", "--no-such-flag"]), 2);
    assert_eq!(run(&["verify", "--form", "nope", "--input", "x.json"]), 2);
    assert_eq!(run(&["nonsense"]), 2);
    // parse error in an expression flag, offset surfaced
    assert_eq!(
        run(&[
            "integral",
            "--prop",
            "4.1",
            "--f",
            "x ** 2",
            "--g",
            "x",
            "--h",
            "1",
            "--interval",
            "0,1",
            "--m",
            "0.1",
            "--M",
            "2",
        ]),
        2
    );
    // malformed interval
    assert_eq!(
        run(&[
            "integral",
            "--prop",
            "4.1",
            "--f",
            "x",
            "--g",
            "x",
            "--h",
            "1",
            "--interval",
            "0;1",
            "--m",
            "0.1",
            "--M",
            "2",
        ]),
        2
    );
}

#[test]
fn fuzz_is_deterministic_under_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let c = dir.path().join("c.jsonl");
    for (path, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let code = run(&[
            "fuzz",
            "--dim",
            "3",
            "--mode",
            "complex",
            "--trials",
            "100",
            "--seed",
            seed,
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let ta = strip_elapsed(&fs::read_to_string(&a).unwrap());
    let tb = strip_elapsed(&fs::read_to_string(&b).unwrap());
    let tc = strip_elapsed(&fs::read_to_string(&c).unwrap());
    assert_eq!(ta, tb, "same argv and seed must give identical records");
    assert_ne!(ta, tc, "different seeds must differ");
    assert!(ta.lines().count() >= 100);
}

#[test]
fn fuzz_records_parse_and_hold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.jsonl");
    assert_eq!(
        run(&[
            "fuzz",
            "--dim",
            "4",
            "--trials",
            "50",
            "--output",
            out.to_str().unwrap()
        ]),
        0
    );
    for line in fs::read_to_string(&out).unwrap().lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["record"], "inequality");
        assert_eq!(record["verdict"], "holds");
        assert!(record["input_digest"].as_str().unwrap().len() == 16);
    }
}

#[test]
fn reproducer_files_replay() {
    // No violation is reachable through honest inputs, so replay the
    // format instead: a verify input written by hand in the reproducer
    // schema round-trips through the loader.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("repro.json");
    fs::write(
        &path,
        r#"{"form":"thm21","x":[1.0,1.0,0.0],"y":[1.0,0.0,0.0],"z":[0.0,0.0,1.0],"a":0.0,"A":2.0,"weights":[1.0,1.0,1.0],"mode":"real"}"#,
    )
    .unwrap();
    assert_eq!(
        run(&[
            "verify",
            "--form",
            "thm21",
            "--input",
            path.to_str().unwrap()
        ]),
        0
    );
    assert!(Path::new(&path).exists());
}

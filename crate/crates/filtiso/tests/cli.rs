//! End-to-end checks of the installed binary: argv parsing, exit codes, and
//! document round-trips through real process boundaries.

use std::io::Write as _;
use std::process::{Command, Stdio};

fn filtiso() -> Command {
    Command::new(env!("CARGO_BIN_EXE_filtiso"))
}

const FULL_FLAG_TYPE: &str =
    r#"{"schema": 1, "d": 3, "e": 1, "f": 1, "embeddings": [[[2, 1], [1, 2], [0, 3]]]}"#;

#[test]
fn mu_of_nu_inline_json_and_exit_zero() {
    let out = filtiso()
        .args(["mu-of-nu", "--input", FULL_FLAG_TYPE])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("thresholds: (0, 1, 3)"), "{text}");
}

#[test]
fn stdin_input_and_json_output_round_trip() {
    let mut child = filtiso()
        .args(["mu-of-nu", "--input", "-", "--json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(FULL_FLAG_TYPE.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    assert_eq!(value["schema"], 1);
    assert_eq!(value["coweight"][2], "-2");
}

#[test]
fn file_input_works_and_warning_goes_to_stderr() {
    let dir = std::env::temp_dir();
    let path = dir.join("filtiso_cli_test_type.json");
    std::fs::write(
        &path,
        r#"{"schema": 1, "d": 2, "e": 1, "f": 1, "embeddings": [[[2, 1], [1, 2]]]}"#,
    )
    .unwrap();
    let out = filtiso()
        .args(["mu-of-nu", "--input", path.to_str().unwrap()])
        .output()
        .unwrap();
    std::fs::remove_file(&path).ok();
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("warning:"), "stderr was: {err}");
    assert!(err.contains("nonzero final jump"));
}

#[test]
fn exit_codes_distinguish_negative_parse_and_validation() {
    // stratum non-membership is a mathematical negative
    let out = filtiso()
        .args([
            "stratum",
            "--input",
            r#"{"schema": 1, "point": ["-1", "1", "3"],
                "coweight": ["0", "-1", "-2"]}"#,
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = filtiso()
        .args(["newton-polygon", "--input", "{ broken"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // decreasing entries are not a dominant coweight
    let out = filtiso()
        .args([
            "stratum",
            "--input",
            r#"{"schema": 1, "point": ["0", "1"], "coweight": ["0", "1"]}"#,
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn examples_subcommand_exits_zero() {
    let out = filtiso().args(["examples", "--seed", "9"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("all checks passed"));
    assert!(!text.contains("FAIL"));
}

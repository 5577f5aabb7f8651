//! End-to-end checks of the binary: exit-code contract, output formats, and
//! byte-level determinism.

use std::process::{Command, Output};

fn gnch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn eval_flags_turning_point_rows_and_exits_2() {
    let out = gnch(&["eval", "--preset", "mixed", "--lambda", "1", "--a0", "0", "--times", "0:1:5"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,m1,valid");
    assert_eq!(lines.len(), 6);
    assert!(lines[2].starts_with("0.25,"), "{}", lines[2]);
    assert!(lines[2].ends_with(",0"));
    // the valid rows end in 1
    assert!(lines[1].ends_with(",1"));
}

#[test]
fn eval_single_valid_row_exits_0() {
    let out = gnch(&["eval", "--preset", "ch", "--lambda", "2", "--a0", "0", "--times", "0:0:1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn eval_exact_mode_prints_rationals() {
    let out = gnch(&[
        "eval", "--preset", "mixed", "--lambda", "1", "--times", "0:1:5", "--mode", "exact",
    ]);
    assert_eq!(out.status.code(), Some(2)); // t = 1/4 is degenerate
    let text = stdout(&out);
    assert!(text.contains("1/4,nan,nan,0"), "{text}");
    assert!(text.contains(",2/3,1"), "{text}");
}

#[test]
fn eval_exact_mode_rejects_r_zero_presets() {
    let out = gnch(&["eval", "--preset", "ch", "--lambda", "2", "--times", "0:0:1", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_json_format_round_trips() {
    let out = gnch(&[
        "eval", "--preset", "mixed", "--lambda", "1,-1", "--times", "0.3:0.45:4", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let states = doc["states"].as_array().unwrap();
    assert_eq!(states.len(), 4);
    assert_eq!(states[0]["valid"], true);
    assert_eq!(states[0]["x"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(gnch(&["eval", "--times", "0:1:3"]).status.code(), Some(1));
    assert_eq!(
        gnch(&["eval", "--preset", "nope", "--lambda", "1", "--times", "0:1:3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        gnch(&["eval", "--preset", "mixed", "--lambda", "1", "--times", "0:1"]).status.code(),
        Some(1)
    );
    assert_eq!(gnch(&["figure", "--fig", "3"]).status.code(), Some(1));
}

#[test]
fn identities_pass_and_corrupt_control_fails() {
    let out = gnch(&["identities", "--trials", "1", "--max-n", "1", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // 17 identity counters reported
    let reported = text.lines().filter(|l| l.contains(" pass ")).count();
    assert_eq!(reported, 17);

    let out = gnch(&["identities", "--trials", "3", "--seed", "3", "--corrupt"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("identity"), "{err}");
    assert!(err.contains("elements"), "{err}");
}

#[test]
fn ode_and_spectrum_exit_codes() {
    let out = gnch(&[
        "ode", "--preset", "mixed", "--lambda", "1", "--times", "0.5:0.9:2", "--steps", "4096",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["max_dev_m"].as_f64().unwrap() <= 1e-9);

    // a window containing the turning point is a domain error
    let out = gnch(&[
        "ode", "--preset", "mixed", "--lambda", "1", "--times", "0.2:0.3:2", "--steps", "256",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = gnch(&[
        "spectrum", "--preset", "mixed", "--lambda", "1", "--times", "0.4:0.6:3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["expected_slope"], -4.0);

    let out = gnch(&["spectrum", "--preset", "ch", "--lambda", "1,3", "--times", "0:0.7:3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        let out = gnch(&[
            "eval",
            "--preset",
            "mixed",
            "--lambda",
            "1,-1",
            "--times",
            "0.3:0.45:7",
            "--grid",
            "-4:4:101",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(&path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));

    let ident = |seed: &str| -> String {
        stdout(&gnch(&["identities", "--trials", "5", "--seed", seed]))
    };
    assert_eq!(ident("11"), ident("11"));
    assert_ne!(ident("11"), ident("12"));
}

#[test]
fn eval_profile_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("states.csv");
    let out = gnch(&[
        "eval",
        "--preset",
        "mixed",
        "--lambda",
        "1",
        "--times",
        "0.5:0.5:1",
        "--grid",
        "-2:2:11",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let profile = dir.path().join("states.profile.csv");
    let text = std::fs::read_to_string(profile).unwrap();
    assert!(text.starts_with("t,x,u\n"));
    // 11 grid points + 1 inserted peak location
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn figure_emits_caption_frames() {
    let out = gnch(&["figure", "--fig", "2", "--grid", "-6:6:121"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for frame in ["-0.5,", "-0.125,", "0.125,", "0.5,"] {
        assert!(text.lines().any(|l| l.starts_with(frame)), "missing frame {frame}");
    }
}

#[test]
fn system_json_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sys.json");
    std::fs::write(&path, r#"{"r": 0.0, "s": 1.0, "modes": [{"lambda": 2.0, "a0": 0.0}]}"#)
        .unwrap();
    let out = gnch(&[
        "eval", "--system", path.to_str().unwrap(), "--times", "0:1:3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 4);
}

//! End-to-end runs of the `reqcheck` binary.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/models")
        .join(name)
}

fn reqcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reqcheck"))
        .args(args)
        .env_remove("REQCHECK_UNROLL")
        .output()
        .expect("binary runs")
}

fn lgs() -> String {
    model("lgs.req").display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn correct_model_passes() {
    let out = reqcheck(&["check", &lgs()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.split_whitespace().nth(1) == Some("PASS")));
    let ext = rows.iter().find(|r| r.starts_with("extension_duration")).unwrap();
    assert_eq!(ext.split_whitespace().last(), Some("25"));
}

#[test]
fn injected_error_fails_with_the_counterexample() {
    let out = reqcheck(&[
        "check",
        &lgs(),
        "--inject-error",
        "--requirement",
        "extension_duration",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let v = &report[0];
    assert_eq!(v["requirement"], "extension_duration");
    assert_eq!(v["result"], "fail");
    let cex = &v["counterexamples"][0];
    assert_eq!(cex["kind"], "diverged");
    assert_eq!(
        cex["initial_state"],
        serde_json::json!({
            "handle_status": "down_position",
            "door_status": "closing_state",
            "gear_status": "retracted_position",
            "duration": 0
        })
    );
    assert_eq!(cex["trace"], serde_json::json!([]));
    for key in ["states_explored", "max_duration_delta"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn the_generic_arm_drop_matches_inject_error() {
    let a = reqcheck(&["check", &lgs(), "--inject-error", "--json"]);
    let b = reqcheck(&["check", &lgs(), "--drop-case-arm", "open_door:closing_state", "--json"]);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
    let bad = reqcheck(&["check", &lgs(), "--drop-case-arm", "open_door"]);
    assert_eq!(bad.status.code(), Some(3));
    let missing = reqcheck(&["check", &lgs(), "--drop-case-arm", "open_door:nothing"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn traces_are_included_on_request() {
    let out = reqcheck(&["check", &lgs(), "--inject-error", "--requirement", "extension_duration", "--json", "--trace"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let trace = report[0]["counterexamples"][0]["trace"].as_array().unwrap();
    assert!(!trace.is_empty());
    assert_eq!(trace[0]["routine"], "run_with_handle_down");
    assert!(trace[0]["statement"].as_str().unwrap().contains("assume handle_status = down_position"));
    let table = reqcheck(&["check", &lgs(), "--inject-error", "--trace"]);
    let text = stdout(&table);
    assert!(text.contains("diverged: from [handle_status=down_position, door_status=closing_state, gear_status=retracted_position, duration=0]"), "{text}");
    assert!(text.contains("loop repeats"));
}

#[test]
fn low_unroll_bound_is_unknown() {
    let out = reqcheck(&["check", &lgs(), "--requirement", "extension_duration", "--unroll", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("UNKNOWN"));
    let out = Command::new(env!("CARGO_BIN_EXE_reqcheck"))
        .args(["check", &lgs(), "--requirement", "extension_duration"])
        .env("REQCHECK_UNROLL", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = reqcheck(&["check", &lgs(), "--requirement", "extension_duration", "--unroll", "6"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn runs_are_byte_identical() {
    let args = ["check", &lgs(), "--inject-error", "--json", "--trace"];
    let a = reqcheck(&args);
    let b = reqcheck(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn errors_exit_with_3() {
    let out = reqcheck(&["check", "/nonexistent/model.req"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("error: "));

    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "model broken\nattribute a : 0 .. 3\nroutine main do\n    a := \nend").unwrap();
    let out = reqcheck(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains(":5:1: "), "{}", stderr(&out));

    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "model m\nenv attribute h : {{u, d}}\nroutine main do\n    h := u\nend\nroutine r requirement do\n    main\n    assert h = u end\nend"
    )
    .unwrap();
    let out = reqcheck(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("environment"), "{}", stderr(&out));

    let out = reqcheck(&["check", &lgs(), "--requirement", "nope"]);
    assert_eq!(out.status.code(), Some(3));
    let out = reqcheck(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(3));
    let out = reqcheck(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn synth_prints_the_bounded_response_routine() {
    let out = reqcheck(&[
        "synth",
        "p4",
        "--name",
        "extension_duration",
        "--prop",
        "gear_status = extended_position and door_status = closed_position",
        "--time",
        "25",
        "--inner",
        "run_with_handle_down",
        "--model",
        &lgs(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let body: Vec<&str> = text.lines().skip_while(|l| l.starts_with("--")).collect();
    assert_eq!(
        body,
        [
            "routine extension_duration requirement do",
            "    from",
            "        run_with_handle_down",
            "    until",
            "        (gear_status = extended_position and door_status = closed_position) or (duration - old duration) > 25",
            "    loop",
            "        run_with_handle_down",
            "    end",
            "    assert gear_status = extended_position end",
            "    assert door_status = closed_position end",
            "    assert (duration - old duration) <= 25 end",
            "end",
        ]
    );
}

#[test]
fn synth_validates_its_arguments() {
    let base = ["--name", "x", "--inner", "main"];
    let run = |extra: &[&str]| {
        let mut args = vec!["synth"];
        args.extend_from_slice(extra);
        args.extend_from_slice(&base);
        reqcheck(&args).status.code()
    };
    assert_eq!(run(&["p3", "--prop", "a = b"]), Some(3));
    assert_eq!(run(&["p2", "--prop", "a = b", "--time", "3"]), Some(3));
    assert_eq!(run(&["p1", "--prop", "a = b"]), Some(3));
    assert_eq!(run(&["p1"]), Some(3));
    assert_eq!(run(&["p5", "--prop", "a = b"]), Some(3));
    assert_eq!(run(&["p2", "--prop", "a = "]), Some(3));
    assert_eq!(run(&["p2", "--prop", "a = b"]), Some(0));
    assert_eq!(run(&["p1", "--cond", "a = b", "--cond", "c = d"]), Some(0));
    let out = reqcheck(&["synth", "p2", "--prop", "x = 1", "--name", "r", "--inner", "nowhere", "--model", &lgs()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn translate_asm_prints_routines_and_checks_them() {
    let out = reqcheck(&["translate-asm", model("gcd.req").to_str().unwrap(), "--check-oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("routine main do\n"), "{text}");
    assert!(text.contains(":= max (a - b, b)") || text.contains(":= max(a - b, b)"), "{text}");
    assert!(text.contains("-- oracle: rule main agrees with its translation"));

    let out = reqcheck(&["translate-asm", model("lgs_ground.req").to_str().unwrap(), "--check-oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).matches("agrees with its translation").count(), 5);

    let out = reqcheck(&["translate-asm", &lgs()]);
    assert_eq!(out.status.code(), Some(3));

    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "model m\nattribute a : 0 .. 3\nrule main =\n    a (1) := 2").unwrap();
    let out = reqcheck(&["translate-asm", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("nullary"), "{}", stderr(&out));
}

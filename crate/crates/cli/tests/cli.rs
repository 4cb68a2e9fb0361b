//! End-to-end tests driving the compiled `dapm` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const MODEL: &str = "\
activity a { n: int 0..9 }
activity b {}

constraint G (a -> F b)
";

fn dapm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dapm"))
}

fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn check_conforming_log_exits_zero() {
    let dir = TempDir::new().unwrap();
    let model = write_file(dir.path(), "m.dapm", MODEL);
    let log = write_file(dir.path(), "l.txt", "trace t1: a(n=3) b\ntrace t2: b\n");

    let out = run(dapm().arg("check").arg("-m").arg(&model).arg("-l").arg(&log));
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("t1 1 satisfied"), "unexpected report: {text}");
    assert!(text.contains("2 of 2 traces conform"), "unexpected report: {text}");
}

#[test]
fn check_nonconforming_log_exits_one() {
    let dir = TempDir::new().unwrap();
    let model = write_file(dir.path(), "m.dapm", MODEL);
    let log = write_file(dir.path(), "l.txt", "trace t1: a(n=3)\n");

    let out = run(dapm().arg("check").arg("-m").arg(&model).arg("-l").arg(&log));
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("t1 1 violated"));
}

#[test]
fn check_json_report_is_valid_json() {
    let dir = TempDir::new().unwrap();
    let model = write_file(dir.path(), "m.dapm", MODEL);
    let log = write_file(dir.path(), "l.txt", "trace t1: a(n=3) b\n");

    let out = run(dapm()
        .arg("check")
        .arg("-m")
        .arg(&model)
        .arg("-l")
        .arg(&log)
        .arg("--report")
        .arg("json"));
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(parsed["total"], 1);
    assert_eq!(parsed["conforming"], 1);
    assert_eq!(parsed["traces"][0]["id"], "t1");
}

#[test]
fn generation_is_deterministic_and_conforming() {
    let dir = TempDir::new().unwrap();
    let model = write_file(dir.path(), "m.dapm", MODEL);

    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = run(dapm()
            .arg("generate")
            .arg("-m")
            .arg(&model)
            .arg("-t")
            .arg("5")
            .arg("-n")
            .arg("4")
            .arg("--seed")
            .arg("42"));
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1], "same seed must reproduce the log");

    // Everything generated must itself pass conformance checking.
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert_eq!(text.lines().count(), 4, "one line per trace: {text}");
    let log = dir.path().join("generated.txt");
    std::fs::write(&log, &outputs[0]).unwrap();
    let check = run(dapm().arg("check").arg("-m").arg(&model).arg("-l").arg(&log));
    assert_eq!(code(&check), 0, "generated log must conform");
}

#[test]
fn infeasible_generation_exits_one() {
    let dir = TempDir::new().unwrap();
    let model = write_file(
        dir.path(),
        "m.dapm",
        "activity a {}\nactivity b {}\n\nconstraint F a\nconstraint G !a\n",
    );

    let out = run(dapm().arg("generate").arg("-m").arg(&model).arg("-t").arg("3"));
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("no trace"), "stderr: {}", stderr(&out));
    assert!(stdout(&out).is_empty());
}

#[test]
fn exhaustive_generation_reports_exhaustion() {
    let dir = TempDir::new().unwrap();
    let model = write_file(dir.path(), "m.dapm", MODEL);

    let out = run(dapm()
        .arg("generate")
        .arg("-m")
        .arg(&model)
        .arg("--max-length")
        .arg("1")
        .arg("-n")
        .arg("100")
        .arg("--exhaustive"));
    assert_eq!(code(&out), 0);
    // Only `b` satisfies the model at length 1: `a` alone leaves the
    // obligation F b open.
    assert_eq!(stdout(&out), "trace t1: b\n");
    assert!(stderr(&out).contains("only 1 of the requested 100"));
}

#[test]
fn xes_output_round_trips_through_check() {
    let dir = TempDir::new().unwrap();
    let model = write_file(dir.path(), "m.dapm", MODEL);
    let log = dir.path().join("generated.xes");

    let out = run(dapm()
        .arg("generate")
        .arg("-m")
        .arg(&model)
        .arg("-t")
        .arg("4")
        .arg("-n")
        .arg("3")
        .arg("--seed")
        .arg("9")
        .arg("-o")
        .arg(&log));
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let written = std::fs::read_to_string(&log).unwrap();
    assert!(written.starts_with("<?xml"), "expected XES output: {written}");

    let check = run(dapm().arg("check").arg("-m").arg(&model).arg("-l").arg(&log));
    assert_eq!(code(&check), 0, "stderr: {}", stderr(&check));
    assert!(stdout(&check).contains("3 of 3 traces conform"));
}

#[test]
fn query_reports_satisfying_assignments() {
    let dir = TempDir::new().unwrap();
    let model = write_file(
        dir.path(),
        "m.dapm",
        "activity a {}\nactivity b {}\nactivity c {}\n\nconstraint F ?A1\n",
    );
    let log = write_file(dir.path(), "l.txt", "trace: a b\ntrace: a\n");

    let out = run(dapm().arg("query").arg("-m").arg(&model).arg("-l").arg(&log));
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("?A1=a"), "report: {text}");
    assert!(!text.contains("?A1=b"), "b misses the second trace: {text}");
    assert!(text.contains("satisfying assignments: 1"), "report: {text}");
}

#[test]
fn query_fail_empty_controls_the_exit_code() {
    let dir = TempDir::new().unwrap();
    // `F c` never holds, so no assignment works.
    let model = write_file(
        dir.path(),
        "m.dapm",
        "activity a {}\nactivity b {}\nactivity c {}\n\nconstraint F ?A1\nconstraint F c\n",
    );
    let log = write_file(dir.path(), "l.txt", "trace: a b\n");

    let plain = run(dapm().arg("query").arg("-m").arg(&model).arg("-l").arg(&log));
    assert_eq!(code(&plain), 0);
    assert!(stdout(&plain).contains("satisfying assignments: 0"));

    let strict = run(dapm()
        .arg("query")
        .arg("-m")
        .arg(&model)
        .arg("-l")
        .arg(&log)
        .arg("--fail-empty"));
    assert_eq!(code(&strict), 1);
}

#[test]
fn usage_errors_exit_two() {
    // Missing the required model argument.
    let out = run(dapm().arg("check").arg("-l").arg("whatever.txt"));
    assert_eq!(code(&out), 2);

    // Contradictory length flags.
    let out = run(dapm()
        .arg("generate")
        .arg("-m")
        .arg("m.dapm")
        .arg("-t")
        .arg("3")
        .arg("--max-length")
        .arg("5"));
    assert_eq!(code(&out), 2);

    // No length bound at all.
    let out = run(dapm().arg("generate").arg("-m").arg("m.dapm"));
    assert_eq!(code(&out), 2);
}

#[test]
fn model_errors_name_the_offending_line() {
    let dir = TempDir::new().unwrap();
    let model = write_file(
        dir.path(),
        "m.dapm",
        "activity a {}\nconstraint G (a -> F nowhere)\n",
    );
    let log = write_file(dir.path(), "l.txt", "trace: a\n");

    let out = run(dapm().arg("check").arg("-m").arg(&model).arg("-l").arg(&log));
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("line 2"), "stderr should locate the error: {err}");
}

#[test]
fn strict_load_fails_where_lenient_repairs() {
    let dir = TempDir::new().unwrap();
    let model = write_file(dir.path(), "m.dapm", MODEL);
    let log = write_file(dir.path(), "l.txt", "trace t1: a(n=99) b\n");

    let strict = run(dapm().arg("check").arg("-m").arg(&model).arg("-l").arg(&log));
    assert_eq!(code(&strict), 2);
    assert!(stderr(&strict).contains("outside 0..9"), "stderr: {}", stderr(&strict));

    let lenient = run(dapm()
        .arg("check")
        .arg("-m")
        .arg(&model)
        .arg("-l")
        .arg(&log)
        .arg("--lenient"));
    assert_eq!(code(&lenient), 0, "stderr: {}", stderr(&lenient));
    assert!(stderr(&lenient).contains("warning:"), "stderr: {}", stderr(&lenient));
    assert!(stderr(&lenient).contains("clamped"), "stderr: {}", stderr(&lenient));
}

#[test]
fn emitted_programs_are_syntactically_clean() {
    let dir = TempDir::new().unwrap();
    let model = write_file(dir.path(), "m.dapm", MODEL);
    let log = write_file(dir.path(), "l.txt", "trace t1: a(n=3) b\n");
    let qmodel = write_file(
        dir.path(),
        "q.dapm",
        "activity a {}\nactivity b {}\n\nconstraint F ?A1\n",
    );
    let qlog = write_file(dir.path(), "ql.txt", "trace t1: a b\n");

    let gen = run(dapm()
        .arg("emit-asp")
        .arg("generate")
        .arg("-m")
        .arg(&model)
        .arg("--min-length")
        .arg("1")
        .arg("--max-length")
        .arg("3"));
    assert_eq!(code(&gen), 0, "stderr: {}", stderr(&gen));
    let program = stdout(&gen);
    assert!(program.contains("#show trace/2."), "program: {program}");
    dapm::asp::check_syntax(&program).expect("generation program parses");

    let check = run(dapm()
        .arg("emit-asp")
        .arg("check")
        .arg("-m")
        .arg(&model)
        .arg("-l")
        .arg(&log));
    assert_eq!(code(&check), 0);
    let program = stdout(&check);
    assert!(program.contains("tr(1..1)."), "program: {program}");
    dapm::asp::check_syntax(&program).expect("conformance program parses");

    let query = run(dapm()
        .arg("emit-asp")
        .arg("query")
        .arg("-m")
        .arg(&qmodel)
        .arg("-l")
        .arg(&qlog));
    assert_eq!(code(&query), 0);
    let program = stdout(&query);
    assert!(program.contains("#show assgnmt/2."), "program: {program}");
    dapm::asp::check_syntax(&program).expect("query program parses");
}

#[test]
fn solve_without_a_configured_solver_exits_two() {
    let dir = TempDir::new().unwrap();
    let model = write_file(dir.path(), "m.dapm", MODEL);

    let out = run(dapm()
        .arg("emit-asp")
        .arg("generate")
        .arg("-m")
        .arg(&model)
        .arg("-t")
        .arg("2")
        .arg("--solve")
        .env_remove("DAPM_ASP_SOLVER"));
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("DAPM_ASP_SOLVER"), "stderr: {}", stderr(&out));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use ndcut::cli::run;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
        .display()
        .to_string()
}

/// Runs in-process and returns (status, stdout, stderr).
fn ndcut(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ndcut").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn check_identity() {
    let (code, out, _) = ndcut(&["check", &data("id.nd")]);
    assert_eq!(code, 0);
    assert_eq!(out, "A -> A\n");
}

#[test]
fn explore_single_beta() {
    let (code, out, _) = ndcut(&["explore", &data("beta.nd")]);
    assert_eq!(code, 0);
    assert_eq!(out, "nodes=2 edges=1 eta=1 nf=1\n");
}

#[test]
fn classify_permutative_head() {
    let (code, out, _) = ndcut(&["classify", &data("cp.nd")]);
    assert_eq!(code, 0);
    let first = out.lines().next().unwrap();
    assert_eq!(first, "case 5");
    assert!(
        out.contains("hred (m [x1.(f x1 c) | x2.(g x2 c)])"),
        "{out}"
    );
}

#[test]
fn step_and_normalize() {
    let (code, out, _) = ndcut(&["step", &data("beta.nd")]);
    assert_eq!((code, out.as_str()), (0, "y\n"));
    let (code, out, _) = ndcut(&[
        "normalize",
        &data("peirce.nd"),
        "--strategy",
        "leftmost",
        "--trace",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "/ beta\n/0/0 beta\nmu a:A. (a v)\n");
}

#[test]
fn step_with_explicit_path() {
    let (code, out, _) = ndcut(&["step", &data("beta.nd"), "--path", "/"]);
    assert_eq!((code, out.as_str()), (0, "y\n"));
    let (code, _, err) = ndcut(&["step", &data("beta.nd"), "--path", "/0"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: "), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.nd", "ctx f:A; (f f)");
    let (code, _, err) = ndcut(&["check", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: "));
    let garbled = write(&dir, "garbled.nd", "(\\x:A. ");
    assert_eq!(ndcut(&["check", garbled.to_str().unwrap()]).0, 1);
    let wrong = write(&dir, "wrong.nd", "\\x:A. x : B");
    assert_eq!(ndcut(&["check", wrong.to_str().unwrap()]).0, 1);
    assert_eq!(ndcut(&["check", "/definitely/not/here.nd"]).0, 1);
    assert_eq!(ndcut(&["classify", &data("id.nd")]).0, 1);

    assert_eq!(ndcut(&["frobnicate"]).0, 2);
    assert_eq!(ndcut(&["check"]).0, 2);
    assert_eq!(ndcut(&["normalize", &data("beta.nd")]).0, 2);
    assert_eq!(ndcut(&["gen", "--seed", "x", "--size", "3"]).0, 2);
    assert_eq!(
        ndcut(&["gen", "--seed", "1", "--size", "5", "--goal", "A ->"]).0,
        2
    );
    let (code, _, err) = ndcut(&["step", &data("beta.nd"), "--strategy", "sideways"]);
    assert_eq!(code, 2);
    assert_eq!(err.lines().count(), 1);

    let (code, out, _) = ndcut(&["--help"]);
    assert_eq!(code, 0);
    for sub in [
        "check",
        "step",
        "normalize",
        "explore",
        "classify",
        "gen",
        "harness",
    ] {
        assert!(out.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn normalize_reports_step_limit() {
    let dir = tempfile::tempdir().unwrap();
    let omega = write(&dir, "loop.nd", "(\\x:A. (x x) \\x:A. (x x))");
    let (code, _, err) = ndcut(&[
        "normalize",
        omega.to_str().unwrap(),
        "--strategy",
        "leftmost",
        "--max-steps",
        "5",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("5 steps"), "{err}");
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let (code, _, _) = ndcut(&[
        "explore",
        &data("peirce.nd"),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph reduction {"));
    assert!(text.trim_end().ends_with('}'));
    assert!(
        text.contains("peripheries=2"),
        "normal forms are highlighted"
    );
    assert!(text.contains(" -> "));
}

#[test]
fn outputs_are_deterministic() {
    let runs = [
        vec!["gen", "--seed", "7", "--size", "25", "--count", "4"],
        vec!["explore", &*Box::leak(data("peirce.nd").into_boxed_str())],
        vec![
            "step",
            &*Box::leak(data("peirce.nd").into_boxed_str()),
            "--strategy",
            "random(3)",
        ],
        vec![
            "harness",
            "app",
            &*Box::leak(data("app_case.scn").into_boxed_str()),
        ],
    ];
    for args in runs {
        let a = ndcut(&args);
        let b = ndcut(&args);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn generated_units_check() {
    let (code, out, _) = ndcut(&[
        "gen", "--seed", "3", "--size", "20", "--count", "5", "--goal", "A -> A",
    ]);
    assert_eq!(code, 0);
    let units: Vec<&str> = out.split("\n;\n").collect();
    assert_eq!(units.len(), 5);
    let dir = tempfile::tempdir().unwrap();
    for (i, u) in units.iter().enumerate() {
        let f = write(&dir, &format!("u{i}.nd"), u);
        let (code, ty, err) = ndcut(&["check", f.to_str().unwrap()]);
        assert_eq!(code, 0, "{u}: {err}");
        assert_eq!(ty, "A -> A\n");
    }
}

#[test]
fn harness_app_on_sample_scenarios() {
    for f in ["app_term.scn", "app_proj.scn", "app_case.scn"] {
        let (code, out, err) = ndcut(&["harness", "app", &data(f)]);
        assert_eq!(code, 0, "{f}: {err}");
        assert_eq!(out.lines().next(), Some("verify_app holds"));
        assert!(
            out.lines().last().unwrap().starts_with("certificate ok"),
            "{out}"
        );
    }
}

#[test]
fn harness_app_with_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let sc = fs::read_to_string(data("app_term.scn")).unwrap();
    let scn = write(&dir, "s.scn", &sc);
    // the leftmost trace as printed by normalize
    let parsed = ndcut::syntax::parse_scenario(&sc).unwrap();
    let n = ndcut::reduction::normalize_in(
        &parsed.ctx,
        &parsed.s1(),
        ndcut::reduction::Strategy::Leftmost,
        1000,
    );
    let terms = ndcut::reduction::replay(&parsed.ctx, &parsed.s1(), &n.trace).unwrap();
    let lines: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
    let tr = write(&dir, "t.txt", &lines.join("\n"));
    let with = ndcut(&[
        "harness",
        "app",
        scn.to_str().unwrap(),
        "--trace",
        tr.to_str().unwrap(),
    ]);
    let without = ndcut(&["harness", "app", scn.to_str().unwrap()]);
    assert_eq!(with, without);

    // a trace that skips a step is rejected
    if terms.len() >= 3 {
        let broken = [lines[0].clone(), lines[2].clone()].join("\n");
        let tr = write(&dir, "bad.txt", &broken);
        let (code, _, _) = ndcut(&[
            "harness",
            "app",
            scn.to_str().unwrap(),
            "--trace",
            tr.to_str().unwrap(),
        ]);
        assert_eq!(code, 1);
    }
}

#[test]
fn binary_exit_status_matches_run() {
    let exe = env!("CARGO_BIN_EXE_ndcut");
    let ok = Command::new(exe)
        .args(["check", &data("id.nd")])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "A -> A\n");
    let usage = Command::new(exe).arg("bogus").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let domain = Command::new(exe)
        .args(["classify", &data("id.nd")])
        .output()
        .unwrap();
    assert_eq!(domain.status.code(), Some(1));
}

mod common;

use std::process::Command;

use common::fixture;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn omlcond(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_omlcond"))
        .args(args)
        .current_dir(fixture(""))
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

#[test]
fn validate() {
    let r = omlcond(&["validate", "mo2_paper.oml"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("lattice: passed"));
    assert_eq!(omlcond(&["validate", "boolean3.oml"]).code, 0);

    let r = omlcond(&["validate", "mo2_missing_ortho.oml"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("NotOrthocomplemented"));
    assert!(r.stderr.contains("violation [ortho-total] at (b)"));

    let r = omlcond(&["validate", "hexagon_bad_ortho.oml"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("[order-reversing]"));
    let r = omlcond(&["validate", "hexagon.oml"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("[orthomodular]"));
    assert_eq!(omlcond(&["validate", "pentagon.oml"]).code, 1);
}

#[test]
fn condition() {
    let r = omlcond(&["condition", "mo2_paper.oml", "b", "1"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("= 29/100"));
    assert!(r.stdout.contains("0.29"));
    assert!(omlcond(&["condition", "mo2_paper.oml", "a", "a"]).stdout.contains("f(a,a) = 1"));
    assert!(omlcond(&["condition", "mo2_paper.oml", "a", "1"]).stdout.contains("= 1/10"));

    let r = omlcond(&["condition", "mo2_paper.oml", "a", "b"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("not a condition"));
    let r = omlcond(&["condition", "mo2_paper.oml", "a", "zz"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("zz"));

    let r = omlcond(&["--extend", "f(a,b)=10/29", "condition", "mo2_paper.oml", "a", "b"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("= 10/29"));
    let r = omlcond(&["--extend", "f(a,b)=1/2", "condition", "mo2_paper.oml", "a", "b"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("extension rejected"));
    assert_eq!(omlcond(&["--extend", "g(a,b)=1", "condition", "mo2_paper.oml", "a", "b"]).code, 2);
}

#[test]
fn independence() {
    let r = omlcond(&["independence", "mo2_paper.oml", "b", "a", "1"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("DEPENDENT") && !r.stdout.contains("INDEPENDENT"));
    assert!(r.stdout.contains("1/5") && r.stdout.contains("29/100"));

    let r = omlcond(&["--extend", "f(a,b)=1/10,f(a,b')=1/10", "independence", "mo2_paper.oml", "a", "b", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("INDEPENDENT"));

    assert!(omlcond(&["independence", "mo2_paper.oml", "1", "a", "1"]).stdout.contains("INDEPENDENT"));
    let r = omlcond(&["independence", "mo2_paper.oml", "b", "a'", "a"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("not well posed"));
}

#[test]
fn worked_example() {
    let r = omlcond(&["paper-example"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(!r.stdout.contains("MISMATCH"));
    let r = omlcond(&["paper-example", "--weights", "1/5,4/5"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("MISMATCH"));
    let r = omlcond(&["paper-example", "--alpha-b", "3/10"]);
    assert_eq!(r.code, 1);
    assert_eq!(omlcond(&["paper-example", "--weights", "1/2"]).code, 2);
}

#[test]
fn suites() {
    for suite in ["prop13", "prop21", "prop22", "cs", "state"] {
        let r = omlcond(&["check", "mo2_paper.oml", suite]);
        assert_eq!(r.code, 0, "{suite}: {}{}", r.stdout, r.stderr);
    }
    for suite in ["prop13", "prop21", "prop22", "cs", "state"] {
        assert_eq!(omlcond(&["check", "boolean3.oml", suite]).code, 0, "{suite}");
    }
    let r = omlcond(&["--extend", "f(a,b)=1/10,f(a,b')=1/10", "check", "mo2_paper.oml", "prop22"]);
    assert_eq!(r.code, 0, "{}", r.stderr);

    let r = omlcond(&["check", "broken_cs.oml", "cs"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("[cs-join] at (a, b)"));

    for suite in ["prop11", "prop12"] {
        assert_eq!(omlcond(&["check", "classical3.oml", suite]).code, 0, "{suite}");
    }
    assert_eq!(omlcond(&["check", "overlapping.oml", "prop11"]).code, 0);
    assert_eq!(omlcond(&["check", "overlapping.oml", "prop12"]).code, 1);
    assert_eq!(omlcond(&["check", "classical3.oml", "prop13"]).code, 1);
}

#[test]
fn state_check() {
    let r = omlcond(&["state-check", "mo2_paper.oml"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("state alpha: passed"));
    assert_eq!(omlcond(&["state-check", "boolean3.oml", "--state", "spread"]).code, 0);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(omlcond(&["validate", "no_such_file.oml"]).code, 2);
    assert_eq!(omlcond(&["bogus"]).code, 2);
    assert_eq!(omlcond(&["condition", "mo2_paper.oml", "a"]).code, 2);

    let dir = std::env::temp_dir().join(format!("omlcond-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.oml");
    std::fs::write(&bad, "elements: 0 1\nleq: 0 q\n").unwrap();
    let r = omlcond(&["validate", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes_are_deterministic() {
    let cases: &[&[&str]] = &[
        &["validate", "mo2_missing_ortho.oml"],
        &["condition", "mo2_paper.oml", "b", "1"],
        &["check", "overlapping.oml", "prop12"],
        &["check", "mo2_paper.oml", "prop21"],
        &["paper-example"],
    ];
    for args in cases {
        let (a, b) = (omlcond(args), omlcond(args));
        assert_eq!((a.code, &a.stdout, &a.stderr), (b.code, &b.stdout, &b.stderr), "{args:?}");
    }
}

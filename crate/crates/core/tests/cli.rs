use std::io::Write;
use std::process::{Command, Stdio};

use carlitz::carlitz::{carlitz_log, pi_tilde};
use carlitz::cli::{run, EXIT_EXTENSION, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use carlitz::motive::MotivePresentation;
use carlitz::{FieldConfig, LocalElement};
use serde_json::Value;

fn carlitz(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut all = vec!["carlitz"];
    all.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(all, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str], stdin: &str) -> (i32, Value) {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    let (code, out, err) = carlitz(&a, stdin);
    assert!(err.is_empty(), "{err}");
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn clog_of_zeta_is_period_over_theta() {
    let f = FieldConfig::default_field();
    let (code, v) = json(&["clog", "z", "--prec", "200"], "");
    assert_eq!(code, EXIT_OK);
    let got = LocalElement::from_json(&f, &serde_json::from_value(v).unwrap()).unwrap();
    let want = pi_tilde(&f, 200).mul_ref(&LocalElement::theta(&f).inv().unwrap());
    assert!(got.sub_ref(&want).is_zero());
}

#[test]
fn verify_targets_pass() {
    for t in ["omega-fe", "period", "torsion-log", "exp-kernel", "lalpha"] {
        let (code, out, _) = carlitz(&["verify", t, "--tdeg", "40", "--prec", "200"], "");
        assert_eq!(code, EXIT_OK, "{t}: {out}");
        assert!(out.starts_with("PASS"), "{out}");
    }
}

#[test]
fn relations_for_zeta() {
    let (code, v) = json(&["relations", "--alphas", "z", "--dt", "1", "--vlo", "-1", "--vhi", "0"], "");
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["gamma"]["dim"], 1);
    assert_eq!(v["relations"].as_array().unwrap().len(), 1);
}

#[test]
fn presentation_from_stdin() {
    let f = FieldConfig::default_field();
    let m = MotivePresentation::carlitz_power(&f, 1, 12, 60).unwrap();
    let text = serde_json::to_string(&m.to_json()).unwrap();
    let args = ["verify", "presentation", "--presentation", "-", "--prec", "60"];
    let (code, v) = json(&args, &text);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["pass"], true);

    let mut bad = m.clone();
    let s = bad.psi.get(0, 0).clone();
    let c = s.coeff(2).add_ref(&LocalElement::one(&f));
    bad.psi.set(0, 0, s.with_coeff(2, c));
    let (code, v) = json(&args, &serde_json::to_string(&bad.to_json()).unwrap());
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(v["pass"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(carlitz(&["cexp", "t"], "").0, EXIT_USAGE);
    let (code, _, err) = carlitz(&["cexp", "1 + "], "");
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("syntax error at 4"), "{err}");
    assert_eq!(carlitz(&["clog", "th^2"], "").0, EXIT_USAGE);
    assert_eq!(carlitz(&["frobnicate"], "").0, EXIT_USAGE);
    assert_eq!(carlitz(&["--ram", "3", "pitilde"], "").0, EXIT_USAGE);
    assert_eq!(carlitz(&["caction", "th*t", "1"], "").0, EXIT_USAGE);
    assert_eq!(carlitz(&["reduce-log", "pi^-7"], "").0, EXIT_EXTENSION);
    assert_eq!(carlitz(&["selftest", "--only", "13"], "").0, EXIT_USAGE);
    assert_eq!(carlitz(&["--help"], "").0, EXIT_OK);
}

#[test]
fn stdin_and_caction() {
    let f = FieldConfig::default_field();
    let (code, v) = json(&["caction", "t + 1", "-"], "th^-1");
    assert_eq!(code, EXIT_OK);
    let got = LocalElement::from_json(&f, &serde_json::from_value(v).unwrap()).unwrap();
    // C_{t+1}(x) = (theta + 1) x + x^q
    let x = LocalElement::theta_pow(&f, -1);
    let want = LocalElement::theta(&f).add_ref(&LocalElement::one(&f)).mul_ref(&x).add_ref(&x.pow(3).unwrap());
    assert_eq!(got, want);
    let (code, v) = json(&["reduce-log", "-", "--min-steps", "2"], "th^-2*(th^-2 + th)");
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["n"], 2);
}

#[test]
fn lalpha_alias_and_value() {
    let f = FieldConfig::default_field();
    let (code, v) = json(&["laplha", "z", "--prec", "120", "--tdeg", "30"], "");
    assert_eq!(code, EXIT_OK);
    let at = LocalElement::from_json(&f, &serde_json::from_value(v["value_at_theta"].clone()).unwrap()).unwrap();
    let log = carlitz_log(&LocalElement::zeta(&f), 120).unwrap();
    assert!(at.sub_ref(&log).is_zero());
}

#[test]
fn selftest_single_criteria() {
    assert_eq!(carlitz(&["selftest", "--only", "3"], "").0, EXIT_OK);
    let (code, out, _) = carlitz(&["selftest", "--only", "9"], "");
    assert_eq!(code, EXIT_FAIL);
    assert!(out.contains("[FAIL]") && out.contains("known"));
}

fn binary(args: &[&str], envs: &[(&str, &str)], stdin: &str) -> (i32, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_carlitz"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), out.stdout)
}

#[test]
fn binary_output_is_deterministic() {
    let args = ["--json", "relations", "--alphas", "th^-1,th^-1*(th+1)", "--dt", "2", "--vlo", "-2", "--vhi", "2"];
    let (c1, a) = binary(&args, &[], "");
    let (c2, b) = binary(&args, &[], "");
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let (c1, a) = binary(&["--json", "selftest", "--only", "5", "--seed", "7"], &[], "");
    let (_, b) = binary(&["--json", "selftest", "--only", "5", "--seed", "7"], &[], "");
    assert_eq!(c1, 0);
    assert_eq!(a, b);
}

#[test]
fn environment_overrides() {
    let (code, out) = binary(&["pitilde"], &[("CARLITZ_PREC", "30")], "");
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().trim_end().ends_with("O(pi^30)"));
    let (code, _) = binary(&["clog", "-"], &[], "t");
    assert_eq!(code, 2);
    let (code, _) = binary(&["reduce-log", "pi^-7"], &[], "");
    assert_eq!(code, 3);
}

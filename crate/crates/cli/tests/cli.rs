//! Black-box tests of the `weyl` binary: output shapes and the exit-code
//! contract (0 success, 1 suite failure, 2 parse error, 3 numerical error).

use std::process::{Command, Output};

fn weyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weyl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const SEMIGROUP_SPEC: &str =
    r#"{"G":{"d":3,"m":1,"w":0,"n":3},"profile":{"r":0.6666666666666666,"c":1.0}}"#;

#[test]
fn subgroups_qutrit_order_3() {
    let out = weyl(&["subgroups", "--d", "3", "--k", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("total: 4 subgroups"));
    assert_eq!(text.lines().count(), 6); // header + 4 rows + total
}

#[test]
fn subgroups_tabulates_all_orders() {
    let out = weyl(&["subgroups", "--d", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("<- max"));
    for (k, count) in [(1, 1), (2, 3), (4, 1)] {
        assert!(
            text.lines().any(|l| {
                let mut it = l.split_whitespace();
                it.next() == Some(&k.to_string()) && it.next() == Some(&count.to_string())
            }),
            "missing order {k} count {count}:\n{text}"
        );
    }
}

#[test]
fn subgroups_rejects_bad_order() {
    let out = weyl(&["subgroups", "--d", "4", "--k", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rates_semigroup_columns_are_constant() {
    let out = weyl(&["rates", "--spec", SEMIGROUP_SPEC, "--points", "16"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 10);
    assert!(header.starts_with("t,gamma_0"));
    for line in lines {
        let vals: Vec<f64> = line.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        // <(1,0)> support: channels 3 and 6 at c/|G| = 1/3, rest 0.
        for (alpha, v) in vals.iter().enumerate() {
            let expected = if alpha == 3 || alpha == 6 { 1.0 / 3.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-9, "alpha={alpha}: {v}");
        }
    }
}

#[test]
fn rates_output_is_deterministic() {
    let args = ["rates", "--spec", SEMIGROUP_SPEC, "--points", "8"];
    assert_eq!(stdout(&weyl(&args)), stdout(&weyl(&args)));
}

#[test]
fn rates_zero_profile_gives_zero_columns() {
    let spec = r#"{"d":2,"u":[1,0],"profile":{"r":0.0,"c":1.0}}"#;
    let out = weyl(&["rates", "--spec", spec, "--points", "4"]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        for v in line.split(',').skip(1) {
            assert_eq!(v.parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn rates_noninvertible_grid_exits_3() {
    // Qubit r = 0.6 dephasing: lambda = 1 - 2p vanishes at t = ln 6, which
    // the linear grid hits as its first point.
    let spec = r#"{"d":2,"u":[1,0],"profile":{"r":0.6,"c":1.0}}"#;
    let out = weyl(&[
        "rates",
        "--spec",
        spec,
        "--spacing",
        "linear",
        "--t-min",
        "1.791759469228055",
        "--t-max",
        "3",
        "--points",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not invertible"));
}

#[test]
fn classify_dephasing_is_enm_with_witness() {
    let spec = r#"{"d":3,"u":[1,0],"profile":{"r":0.6666666666666666,"c":1.0}}"#;
    let out = weyl(&["classify", "--spec", spec]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "EternallyNonMarkovian");
    assert_eq!(v["witness"]["alpha"], serde_json::json!([2, 0]));
}

#[test]
fn classify_identity_profile_is_semigroup() {
    let spec = r#"{"d":3,"u":[1,0],"profile":{"r":0.0,"c":1.0}}"#;
    let out = weyl(&["classify", "--spec", spec]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "MarkovianSemigroup");
    assert!(v["witness"].is_null());
}

#[test]
fn classify_rejects_garbage_spec() {
    let out = weyl(&["classify", "--spec", r#"{"d":3}"#]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mixture_four_way_uniform_is_cp_divisible() {
    let spec = r#"{"d":3,"profile":{"r":0.6666666666666666,"c":1.0},"components":[
        {"x":0.25,"G":{"d":3,"m":1,"w":0,"n":3}},
        {"x":0.25,"G":{"d":3,"m":1,"w":1,"n":3}},
        {"x":0.25,"G":{"d":3,"m":1,"w":2,"n":3}},
        {"x":0.25,"G":{"d":3,"m":3,"w":0,"n":1}}]}"#;
    let out = weyl(&["mixture", "--spec", spec]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["theorem2_mode"], true);
    assert_eq!(v["verdict"]["verdict"], "CPDivisible");
    assert_eq!(v["uncovered"].as_array().unwrap().len(), 0);
}

#[test]
fn mixture_two_way_is_enm_with_uncovered_witness() {
    let spec = r#"{"d":3,"profile":{"r":0.6666666666666666,"c":1.0},"components":[
        {"x":0.5,"G":{"d":3,"m":1,"w":0,"n":3}},
        {"x":0.5,"G":{"d":3,"m":3,"w":0,"n":1}}]}"#;
    let out = weyl(&["mixture", "--spec", spec]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"]["verdict"], "EternallyNonMarkovian");
    assert_eq!(v["bound"], 4.0);
    assert_eq!(v["uncovered"].as_array().unwrap().len(), 4);
}

#[test]
fn paper_filter_runs_subset() {
    let out = weyl(&["paper", "--filter", "duality"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("[PASS] duality"));
}

#[test]
fn paper_unmatched_filter_is_usage_error() {
    let out = weyl(&["paper", "--filter", "no-such-check"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn paper_tight_tolerance_fails_gracefully() {
    let out = weyl(&["paper", "--filter", "three-way", "--tol", "1e-17"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("[FAIL]"));
}

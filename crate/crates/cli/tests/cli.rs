use std::process::{Command, Output};

use lucas_density::{rational_from_json, CliError, EXIT_CONSISTENCY, EXIT_INVALID};
use lucas_density_core::{ratio, Error, Rational};
use num_traits::Zero;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lucas-density")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn density_table_row() {
    let o = run(&["density", "--gamma", "3", "1", "--radicand", "8", "--d", "6"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("17/64 (0.265625)"), "{}", stdout(&o));
    assert!(stdout(&o).contains("Q0"));
}

#[test]
fn density_fibonacci() {
    let o = run(&["density", "--a1", "1", "--a2", "-1", "--d", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("delta   2/3 (0.666666)"));
}

#[test]
fn negative_rationals_parse() {
    let o = run(&["density", "--gamma", "-13/14", "3/14", "--radicand", "-3", "--d", "14"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("35/288"));
}

#[test]
fn invalid_inputs_exit_2() {
    for args in [
        &["density", "--a1", "2", "--a2", "1", "--d", "3"][..],
        &["density", "--gamma", "0", "1", "--radicand", "-4", "--d", "3"],
        &["density", "--gamma", "1", "1", "--radicand", "2", "--d", "3"],
        &["density", "--gamma", "3", "1", "--radicand", "8", "--d", "0"],
        &["density", "--gamma", "x", "1", "--radicand", "8", "--d", "2"],
        &["verify", "--a1", "1", "--a2", "-1", "--d", "2", "--limit", "50"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(EXIT_INVALID), "{args:?}");
    }
    let o = run(&["density", "--a1", "2", "--a2", "1", "--d", "3"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("reducible"));
}

#[test]
fn exit_code_mapping() {
    assert_eq!(CliError::from(Error::OracleMismatch("x".into())).exit_code(), EXIT_CONSISTENCY);
    assert_eq!(CliError::from(Error::Torsion).exit_code(), EXIT_INVALID);
    assert_eq!(CliError::from(Error::NormNotOne).exit_code(), EXIT_INVALID);
}

#[test]
fn json_trace_round_trips() {
    for args in [
        &["density", "--gamma", "3", "1", "--radicand", "8", "--d", "6", "--format", "json"][..],
        &["density", "--gamma", "48/50", "7/50", "--radicand", "-4", "--d", "10", "--format", "json"],
        &["density", "--gamma", "1031/1369", "-520/1369", "--radicand", "-3", "--d", "6", "--format", "json"],
    ] {
        let v = json(&run(args));
        let delta = rational_from_json(&v["delta"]).unwrap();
        let mut total = Rational::zero();
        for t in v["trace"].as_array().unwrap() {
            total += rational_from_json(&t["coeff"]).unwrap() * rational_from_json(&t["value"]).unwrap();
        }
        assert_eq!(total, delta, "{args:?}");
    }
    let v = json(&run(&["density", "--gamma", "48/50", "7/50", "--radicand", "-4", "--d", "10", "--format", "json"]));
    assert_eq!(rational_from_json(&v["delta"]).unwrap(), ratio(235, 1152));
    assert_eq!(v["case"], "GAUSS_HI");
    assert_eq!(v["zeta"], "i");
    assert_eq!(v["h"], 2);
}

#[test]
fn oracle_check_reports_containment() {
    let o = run(&["density", "--gamma", "3", "1", "--radicand", "8", "--d", "6", "--oracle-check", "--format", "json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["oracle"]["contains"], true);
    let o = run(&["density", "--gamma", "683/686", "37/686", "--radicand", "-3", "--d", "42", "--oracle-check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("oracle"));
}

#[test]
fn explain_reduction() {
    let s = stdout(&run(&["explain", "--gamma", "48/50", "7/50", "--radicand", "-4", "--d", "10"]));
    for needle in ["k = 1", "m = 2", "d' = 5", "base delta(d') = 5/24", "factor 47/48", "235/1152"] {
        assert!(s.contains(needle), "missing {needle:?} in\n{s}");
    }
    let s = stdout(&run(&["explain", "--gamma", "3", "1", "--radicand", "8", "--d", "6"]));
    assert!(s.contains("S_{6,1,2}(1)") && s.contains("S_{6,4,2}(1)"), "{s}");
    let s = stdout(&run(&["explain", "--a1", "1", "--a2", "-1", "--d", "1"]));
    assert!(s.contains("trivial: density 1"));
}

#[test]
fn verify_fibonacci() {
    let v = json(&run(&["verify", "--a1", "1", "--a2", "-1", "--d", "2", "--limit", "1000000", "--format", "json"]));
    assert!(v["deviation"].as_f64().unwrap() < 0.01);
    assert_eq!(v["pass"], true);
    assert_eq!(v["counted"], v["counted_plus"].as_u64().unwrap() + v["counted_minus"].as_u64().unwrap());
}

#[test]
fn verify_trivial_d() {
    let v = json(&run(&[
        "verify",
        "--gamma",
        "3",
        "1",
        "--radicand",
        "8",
        "--d",
        "1",
        "--limit",
        "10000",
        "--format",
        "json",
    ]));
    assert_eq!(v["ratio"], 1.0);
    assert_eq!(v["deviation"], 0.0);
}

#[test]
fn verify_is_schedule_independent() {
    let args = |t: &'static str| {
        vec![
            "verify",
            "--gamma",
            "17/32",
            "7/32",
            "--radicand",
            "-15",
            "--d",
            "10",
            "--limit",
            "200000",
            "--format",
            "json",
            "--threads",
            t,
        ]
    };
    let a = json(&run(&args("1")));
    let b = json(&run(&args("4")));
    for k in ["eligible", "counted", "counted_plus", "counted_minus"] {
        assert_eq!(a[k], b[k], "{k}");
    }
}

#[test]
fn verify_dumps_ranks() {
    let path = std::env::temp_dir().join(format!("lucas-ranks-{}.csv", std::process::id()));
    let o = run(&[
        "verify",
        "--a1",
        "1",
        "--a2",
        "-1",
        "--d",
        "2",
        "--limit",
        "1000",
        "--format",
        "json",
        "--dump-ranks",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,rank,jacobi,divisible"));
    assert_eq!(lines.next(), Some("3,4,-1,1"));
    assert_eq!(lines.count() + 1, json(&o)["eligible"].as_u64().unwrap() as usize);
}

#[test]
fn tables_ledger() {
    let o = run(&["tables"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("18/18 exact matches"));
    assert!(s.contains("printed as 661/8064"));
    let v = json(&run(&["tables", "--format", "json"]));
    assert_eq!(v["matches"], 18);
    let csv = stdout(&run(&["tables", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 19);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use coexlab_core::persist::CensusFile;

fn coexlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coexlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn census_221_has_55_records_and_is_deterministic() {
    let (a, b) = (tmp("census-a.json"), tmp("census-b.json"));
    for path in [&a, &b] {
        let o = coexlab(&["census", "--p", "5", "--n", "7", "--partition", "2,1", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("(2,1): 55"), "{}", stdout(&o));
    }
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    let file = CensusFile::from_json(&ta).unwrap();
    assert_eq!(file.records().unwrap().len(), 55);
    assert_eq!(file.to_json(), ta);
}

#[test]
fn census_all_totals_93_at_n9() {
    let o = coexlab(&["census", "--p", "5", "--n", "9", "--partition", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("total 93"), "{out}");
    assert!(out.contains("formula 93"), "{out}");
}

#[test]
fn non_prime_is_a_usage_error() {
    let o = coexlab(&["census", "--p", "4", "--n", "7", "--partition", "2,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p must be prime"));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(coexlab(&["census", "--p", "5", "--n", "7", "--partition", "4"]).status.code(), Some(2));
    assert_eq!(coexlab(&["census", "--p", "5", "--n", "6", "--partition", "3"]).status.code(), Some(2));
    assert_eq!(coexlab(&["verify", "--skip", "nonsense"]).status.code(), Some(2));
    assert_eq!(coexlab(&["orbit", "--ring", "Y", "--p", "5"]).status.code(), Some(2));
    assert_eq!(coexlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_p5_passes() {
    let o = coexlab(&["verify", "--p", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all suites passed"));
}

#[test]
fn injected_fault_fails() {
    let o = coexlab(&["verify", "--p", "5", "--inject-fault", "reps", "--skip", "lazard", "--skip", "regular"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn verify_p7_skipping_lazard() {
    let o = coexlab(&["verify", "--p", "7", "--skip", "lazard"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("lazard     skipped"));
}

#[test]
fn formula_spot_value() {
    let o = coexlab(&["formula", "--p", "7", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("assembled 104, closed formula 104"), "{}", stdout(&o));
}

#[test]
fn extremal_group_report() {
    let o = coexlab(&["extremal", "--p", "5", "--f", "3", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("order p^5, exponent p^2, coexponent 3, class 4"), "{out}");
    assert!(out.contains("power lemma failures: 0"));
    assert_eq!(coexlab(&["extremal", "--p", "3", "--f", "3", "--n", "6"]).status.code(), Some(2));
}

#[test]
fn orbit_report() {
    let o = coexlab(&["orbit", "--ring", "W", "--p", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("26 orbits (expected 26)"), "{}", stdout(&o));
}

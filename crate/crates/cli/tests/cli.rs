use std::process::{Command, Output};

use algdeg_core::report::{Report, Status};

fn algdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algdeg")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("algdeg-{}-{name}.json", std::process::id()))
}

#[test]
fn dims_table() {
    let o = algdeg(&["--n", "3", "--field", "3", "dims"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let computed = |name: &str| -> usize {
        let l = out.lines().find(|l| l.split_whitespace().next() == Some(name)).unwrap();
        l.split_whitespace().last().unwrap().parse().unwrap()
    };
    // commutative and anticommutative parts, each minus one copy of V
    let n = 3;
    let c = n * n * (n + 1) / 2;
    let k = n * n * (n - 1) / 2;
    assert_eq!(computed("C"), c);
    assert_eq!(computed("K"), k);
    assert_eq!(computed("N"), c - n);
    assert_eq!(computed("U"), k - n);
}

#[test]
fn spin_eta_is_u() {
    let o = algdeg(&["--n", "4", "--field", "3", "spin", "--vector", "eta", "--expect", "U"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn reducible_factor_exits_one() {
    let o = algdeg(&["--n", "3", "--field", "4", "series", "--chain", "0,U,N,C"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
}

#[test]
fn certified_chain_with_point_module() {
    let o = algdeg(&["--n", "4", "--field", "3", "series", "--chain", "0,MstarP:1,-1,U,K"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&algdeg(&["--n", "2", "dims"])), 2);
    assert_eq!(code(&algdeg(&["--field", "6", "dims"])), 2);
    assert_eq!(code(&algdeg(&["--field", "5", "gamma", "--verify"])), 2);
    assert_eq!(code(&algdeg(&["frobnicate"])), 2);
    assert_eq!(code(&algdeg(&["verify-all", "--anchors", "nope"])), 2);
}

#[test]
fn degen_truncation() {
    let o = algdeg(&["--n", "3", "--field", "4", "degen", "q", "--lambda", "331+112", "--q", "0,0,1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn gamma_in_char_two() {
    let o = algdeg(&["--n", "3", "--field", "2^2", "gamma", "--verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn json_report_round_trips() {
    let path = tmp("roundtrip");
    let p = path.to_str().unwrap();
    let o = algdeg(&["--field", "3", "--json", p, "verify-all", "--anchors", "dims,spin-identities"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let report = Report::from_json_str(&text).unwrap();
    assert!(!report.claims.is_empty());
    assert!(report.claims.iter().all(|c| c.status == Status::Verified));
    assert_eq!(Report::from_json_str(&report.to_json_string()).unwrap(), report);
}

#[test]
fn verify_all_is_deterministic_across_workers() {
    let run = |workers: &str| {
        let path = tmp(&format!("w{workers}"));
        let o = algdeg(&[
            "--workers", workers, "--json", path.to_str().unwrap(), "verify-all", "--ns", "3", "--fields", "3,4",
            "--anchors", "linear-degeneration,transvection-reach,composition-series", "--pairs", "10", "--samples", "5",
        ]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::remove_file(&path).ok();
        text
    };
    assert_eq!(run("1"), run("4"));
}

use std::process::Command;

use fgflip::cli::{run, Status};
use serde_json::Value;

fn fg(args: &[&str]) -> fgflip::cli::RunReport {
    run(std::iter::once("fgflip").chain(args.iter().copied()))
}

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fgflip")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn triangle_pairings_matrix() {
    let r = fg(&["triangle", "2", "--pairings", "--format", "json"]);
    assert_eq!(r.status, Status::Pass);
    let m = r.payload["pairings"].as_array().unwrap();
    assert_eq!(m.len(), 6);
    for (i, row) in m.iter().enumerate() {
        let row = row.as_array().unwrap();
        assert_eq!(row.len(), 6);
        for (j, x) in row.iter().enumerate() {
            let a: fgflip::Q = x.as_str().unwrap().parse().unwrap();
            let b: fgflip::Q = m[j][i].as_str().unwrap().parse().unwrap();
            assert_eq!(a, -b);
        }
    }
}

#[test]
fn n_flag_and_positional_agree() {
    let a = fg(&["triangle", "3", "--verify", "--format", "json"]).to_json();
    let b = fg(&["triangle", "--N", "3", "--verify", "--format", "json"]).to_json();
    assert_eq!(a["payload"], b["payload"]);
}

#[test]
fn verify_pentagon_3() {
    let r = fg(&["verify", "pentagon", "3", "--format", "json"]);
    assert_eq!(r.status, Status::Pass);
    assert!(!r.payload["trace"]["steps"].as_array().unwrap().is_empty());
}

#[test]
fn every_verification_passes_at_n3() {
    for what in ["pentagon", "mu", "zmut", "serre", "r-eq-f", "decomposition", "symmetry"] {
        let r = fg(&["verify", what, "3"]);
        assert_eq!(r.status, Status::Pass, "{what}\n{}", r.text);
    }
}

#[test]
fn qdilog_check_theta_2() {
    let r = fg(&["qdilog", "check", "--theta", "2", "--format", "json"]);
    assert_eq!(r.status, Status::Pass, "{}", r.text);
    for x in r.payload["residuals"].as_array().unwrap() {
        assert!(x["residual"].as_f64().unwrap() < 1e-6, "{x}");
    }
    let csv = fg(&["qdilog", "check", "--theta", "2", "--format", "csv"]).render();
    assert!(csv.starts_with("theta,identity,"));
}

#[test]
fn qdilog_eval_parses_complex() {
    let r = fg(&["qdilog", "eval", "--theta", "1", "--z", "-0.5+0.25i", "--format", "json"]);
    assert_eq!(r.status, Status::Pass);
    assert_eq!(r.payload["z"], serde_json::json!([-0.5, 0.25]));
    let bad = fg(&["qdilog", "eval", "--theta", "1", "--z", "nope"]);
    assert_eq!(bad.exit_code(), 2);
}

#[test]
fn modular_report_json() {
    let r = fg(&["modular", "3", "--hbar", "-2", "--format", "json"]);
    assert_eq!(r.status, Status::Pass);
    assert_eq!(r.payload["tau"], 4);
    assert_eq!(fg(&["modular", "3", "--hbar", "0"]).exit_code(), 2);
}

#[test]
fn graph_commands() {
    let b = fg(&["graph", "build", "3:1,2,1", "--format", "json"]);
    assert_eq!(b.payload["graph"]["faces"].as_array().unwrap().len(), 5);
    let m = fg(&["graph", "mutate", "4", "--family", "E"]);
    assert_eq!(m.status, Status::Pass, "{}", m.text);
    let p = fg(&["graph", "partition", "3", "1", "3", "--family", "F", "--format", "json"]);
    assert_eq!(p.payload["sum"].as_array().map(Vec::len), Some(1));
}

#[test]
fn snake_command() {
    for n in ["1", "3", "5"] {
        assert_eq!(fg(&["snake", n]).status, Status::Pass);
    }
    assert_eq!(fg(&["snake", "0"]).exit_code(), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["suite", "quick"]).0, 0);
    assert_eq!(bin(&["suite", "quick", "--perturb", "0,1"]).0, 1);
    assert_eq!(bin(&["verify", "pentagon", "1"]).0, 2);
    assert_eq!(bin(&["triangle", "3", "--bogus"]).0, 2);
    assert_eq!(bin(&["frobnicate"]).0, 2);
    assert_eq!(bin(&["--help"]).0, 0);
}

#[test]
fn perturbations_are_detected() {
    // every off-diagonal entry of ∇_3 affects some pairing law
    let d = fgflip::triangle::Triangle::new(3).unwrap().space().dim();
    for i in 0..d {
        for j in i + 1..d {
            let r = fg(&["suite", "quick", "--perturb", &format!("{i},{j}")]);
            assert_eq!(r.status, Status::Fail, "({i},{j})");
        }
    }
}

#[test]
fn json_is_deterministic() {
    for args in [&["suite", "quick", "--format", "json"][..], &["modular", "4", "--hbar", "0.5", "--format", "json"]] {
        let (c1, a) = bin(args);
        let (c2, b) = bin(args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema"], "fgflip/1");
    }
}

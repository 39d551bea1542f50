//! End-to-end tests of the binary: exit codes, output formats, and the
//! byte-identical JSON round trip.

use std::process::{Command, Output};

use ffext_cli::report::write_json_value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffext"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn constant_example_passes() {
    let out = run(&["constant", "--surface", "p2", "--p", "3", "--exponent", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = json["results"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["pass"].as_bool().unwrap()));
    let claimed = rows[0]["claimed"].as_f64().unwrap();
    assert!((claimed - (11f64 / 9.0).powf(0.25)).abs() < 1e-12);
    assert_eq!(json["q"], 3);
}

#[test]
fn json_round_trips_byte_identically() {
    for args in [
        vec!["constant", "--surface", "h2", "--p", "3", "--exponent", "4"],
        vec!["convolve", "--surface", "p1", "--p", "5", "--k", "2"],
        vec![
            "maximizer", "--surface", "p2", "--p", "5", "--a", "1", "--b", "0", "--c", "2",
            "--lambda", "0.5,-1.5",
        ],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        let mut rewritten = String::new();
        write_json_value(&parsed, 0, &mut rewritten);
        rewritten.push('\n');
        assert_eq!(text, rewritten, "round trip for {args:?}");
    }
}

#[test]
fn convolve_csv_has_header_and_expected_values() {
    let out = run(&[
        "convolve", "--surface", "p1", "--p", "5", "--k", "3", "--route", "both", "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("target,claimed,computed,gap,pass"));
    assert!(text.contains(",1/5,"));
    assert!(text.contains(",6/5,"));
}

#[test]
fn verify_suites_pass() {
    let out = run(&["verify", "--suite", "lemmas", "--max-q", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["verify", "--suite", "theorems", "--max-q", "5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn fault_injection_fails_with_exit_one() {
    let out = run(&[
        "verify",
        "--suite",
        "theorems",
        "--max-q",
        "3",
        "--inject-fault",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = json["results"].as_array().unwrap();
    assert!(rows.iter().any(|r| !r["pass"].as_bool().unwrap()));
}

#[test]
fn bad_arguments_exit_two() {
    // unknown surface name
    let out = run(&["constant", "--surface", "torus", "--p", "3", "--exponent", "4"]);
    assert_eq!(out.status.code(), Some(2));
    // composite p
    let out = run(&["constant", "--surface", "p2", "--p", "9", "--exponent", "4"]);
    assert_eq!(out.status.code(), Some(2));
    // surface outside this subcommand's list
    let out = run(&[
        "maximizer", "--surface", "p1", "--p", "5", "--a", "0", "--b", "0", "--c", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // clap-level error
    let out = run(&["constant", "--surface", "p2", "--exponent", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convolve_single_routes_work() {
    for route in ["count", "fourier"] {
        let out = run(&[
            "convolve", "--surface", "h2", "--p", "3", "--k", "2", "--route", route,
        ]);
        assert_eq!(out.status.code(), Some(0), "route {route}");
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let rows = json["results"].as_array().unwrap();
        assert_eq!(rows.len(), 27);
        assert!(rows.iter().all(|r| r["pass"].as_bool().unwrap()));
    }
}

#[test]
fn search_on_open_pair_reports_unknown_constant() {
    let out = run(&[
        "search", "--surface", "upsilon3", "--p", "3", "--exponent", "4", "--mode", "complex",
        "--restarts", "2", "--seed", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["results"][0]["claimed"].is_null());
    assert!(json["results"][0]["computed"].as_f64().unwrap() > 0.0);
}

#[test]
fn search_reports_best_ratio() {
    let out = run(&[
        "search", "--surface", "p2", "--p", "3", "--exponent", "4", "--mode", "phase",
        "--restarts", "4", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let best = json["results"][0]["computed"].as_f64().unwrap();
    let claimed = json["results"][0]["claimed"].as_f64().unwrap();
    assert!(best <= claimed + 1e-9);
    assert!(best > 1.0);
}

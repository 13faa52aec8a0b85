//! End-to-end checks of the command-line front end.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde::de::DeserializeOwned;
use serde::Serialize;
use toeplitz_cones::block_cones::MinMaxReport;
use toeplitz_cones::cli::{
    run_args, CaratheodoryResult, ChoiSweep, EquivResult, FactorizeResult, Fourier0Result,
    Outcome, PairResult, PsdResult, SeparateResult,
};
use toeplitz_cones::entanglement::EntanglementCertificate;
use toeplitz_cones::hardy::FloorTrend;
use toeplitz_cones::report::{to_json, ErrorReport, Report};

fn scratch(name: &str, body: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn run(args: &[&str]) -> Outcome {
    run_args(std::iter::once("toeplitz-cones").chain(args.iter().copied())).unwrap()
}

/// Parses the report and checks that serializing it again gives the same bytes.
fn round_trip<T: Serialize + DeserializeOwned>(out: &Outcome) -> Report<T> {
    let report: Report<T> = serde_json::from_str(&out.output).unwrap();
    assert_eq!(to_json(&report).unwrap(), out.output);
    report
}

const IDENTITY: &str = r#"{"n": 3, "symbols": [[0,0],[0,0],[1,0],[0,0],[0,0]]}"#;
const PSD_T: &str = r#"{"n": 3, "symbols": [[0.25,0],[0.5,0],[1,0],[0.5,0],[0.25,0]]}"#;
const INDEFINITE: &str = r#"{"n": 2, "symbols": [[2,0],[1,0],[2,0]]}"#;
const F: &str = r#"{"d": 1, "coeffs": [[1,0],[2,0],[1,0]]}"#;

#[test]
fn psd_identity_exits_zero() {
    let out = run(&["psd", "--json", &scratch("identity.json", IDENTITY)]);
    assert_eq!(out.code, 0);
    let r: Report<PsdResult> = round_trip(&out);
    assert!(r.result.psd);
    assert_eq!(r.result.min_eig, 1.0);
}

#[test]
fn psd_indefinite_exits_one() {
    let out = run(&["psd", "--json", &scratch("indefinite.json", INDEFINITE)]);
    assert_eq!(out.code, 1);
    let r: Report<PsdResult> = round_trip(&out);
    assert!((r.result.min_eig + 1.0).abs() < 1e-12);
}

#[test]
fn pair_with_atom_gives_evaluation() {
    let input = r#"{"lambda": [0.6, 0.8], "f": {"d": 2, "coeffs": [[0,1],[1,0],[2,0],[3,0],[0,-1]]}}"#;
    let out = run(&["pair", "--json", &scratch("pair.json", input)]);
    assert_eq!(out.code, 0);
    let r: Report<PairResult> = round_trip(&out);
    assert!(r.result.deviation.unwrap() < 1e-12);
}

#[test]
fn pair_rejects_ambiguous_input() {
    let input = format!(r#"{{"t": {PSD_T}, "lambda": [1, 0], "f": {F}}}"#);
    let out = run(&["pair", "--json", &scratch("ambiguous.json", &input)]);
    assert_eq!(out.code, 2);
    let _: ErrorReport = serde_json::from_str(&out.output).unwrap();
}

#[test]
fn factorize_scalar_and_block() {
    let out = run(&["factorize", "--json", &scratch("f.json", F)]);
    assert_eq!(out.code, 0);
    let r: Report<FactorizeResult> = round_trip(&out);
    assert!(r.result.residual < 1e-10);
    let block = r#"{"d": 1, "m": 2, "coeffs": [
        [[[0.5,0],[0,0]],[[0,0],[0.5,0]]],
        [[[2,0],[0,0]],[[0,0],[2,0]]],
        [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]}"#;
    let out = run(&["factorize", "--json", &scratch("bf.json", block)]);
    assert_eq!(out.code, 0);
    let r: Report<FactorizeResult> = round_trip(&out);
    assert!(r.result.residual < 1e-8);
    assert_eq!(r.result.h.block_size(), 2);
}

#[test]
fn caratheodory_and_its_negative_verdict() {
    let out = run(&["caratheodory", "--json", &scratch("t.json", PSD_T)]);
    assert_eq!(out.code, 0);
    let r: Report<CaratheodoryResult> = round_trip(&out);
    assert!(r.result.atoms <= 5 && r.result.residual < 1e-8 && r.result.circle_deviation < 1e-9);
    let out = run(&["caratheodory", "--json", &scratch("indef.json", INDEFINITE)]);
    assert_eq!(out.code, 1);
}

#[test]
fn separate_reports_psd_weights() {
    let out = run(&["separate", "--json", &scratch("t2.json", PSD_T), "--eps", "0.01"]);
    assert_eq!(out.code, 0);
    let r: Report<SeparateResult> = round_trip(&out);
    assert!(r.result.residual < 1e-8 && r.result.min_weight_eig >= -1e-10);
}

#[test]
fn equiv_check_small_sweep() {
    let out = run(&["equiv-check", "--instances", "6", "--trials", "20", "--seed", "9"]);
    assert_eq!(out.code, 0);
    let r: Report<EquivResult> = round_trip(&out);
    assert_eq!(r.result.disagreements, 0);
    assert_eq!(r.seed, 9);
}

#[test]
fn minmax_counterexample() {
    let out = run(&["counterexample", "minmax", "--grid", "256"]);
    assert_eq!(out.code, 0);
    let r: Report<MinMaxReport> = round_trip(&out);
    assert!(r.result.certificate.certified_margin > 0.0 && r.result.obstruction_max < -0.01);
}

#[test]
fn xi_verdicts() {
    let out = run(&["xi", "--n", "3"]);
    assert_eq!(out.code, 0);
    let r: Report<EntanglementCertificate> = round_trip(&out);
    assert_eq!(r.verdict, "entangled");
    let out = run(&["xi", "--n", "1"]);
    assert_eq!(out.code, 1);
}

#[test]
fn choi_demo_sweep() {
    let out = run(&["choi-demo", "--samples", "20"]);
    assert_eq!(out.code, 0);
    let r: Report<ChoiSweep> = round_trip(&out);
    assert_eq!(r.result.psd_preserved, 20);
}

#[test]
fn hardy_json_and_csv() {
    let path = scratch("hardy.json", F);
    let out = run(&["hardy", "--symbol", &path, "--sizes", "8,32"]);
    assert_eq!(out.code, 0);
    let r: Report<FloorTrend> = round_trip(&out);
    assert!(r.result.monotone && r.result.floors.len() == 2);
    let out = run(&["hardy", "--json", &path, "--sizes", "8,32", "--csv"]);
    let lines: Vec<&str> = out.output.lines().collect();
    assert_eq!(lines[0], "size,lambda_min");
    let v: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(v, r.result.floors[0]);
}

#[test]
fn fourier0_and_its_preconditions() {
    let path = scratch("f0.json", F);
    let out = run(&["fourier0", "--p", "3", "--json", &path]);
    assert_eq!(out.code, 0);
    let r: Report<Fourier0Result> = round_trip(&out);
    assert!(r.result.deviation < 1e-12);
    assert_eq!(run(&["fourier0", "--p", "4", "--json", &path]).code, 2);
}

#[test]
fn malformed_input_is_an_error() {
    let out = run(&["psd", "--json", &scratch("bad.json", r#"{"n": 2, "symbols": [[1,0]]}"#)]);
    assert_eq!(out.code, 2);
    let out = run(&["psd", "--json", &scratch("extra.json", r#"{"n": 1, "symbols": [[1,0]], "x": 1}"#)]);
    assert_eq!(out.code, 2);
    let out = run(&["psd"]);
    assert_eq!(out.code, 2);
}

#[test]
fn bad_tolerance_is_an_error() {
    let out = run(&["--tol=-1", "xi", "--n", "2"]);
    assert_eq!(out.code, 2);
}

#[test]
fn binary_writes_out_file_and_exit_code() {
    let input = scratch("bin-indef.json", INDEFINITE);
    let out_path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests/bin-report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_toeplitz-cones"))
        .args(["psd", "--json", &input, "--out", &out_path.display().to_string()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(text, run(&["psd", "--json", &input]).output);
}

#[test]
fn same_seed_same_bytes() {
    let a = run(&["equiv-check", "--instances", "4", "--trials", "10", "--seed", "5"]);
    let b = run(&["equiv-check", "--instances", "4", "--trials", "10", "--seed", "5"]);
    let c = run(&["equiv-check", "--instances", "4", "--trials", "10", "--seed", "6"]);
    assert_eq!(a, b);
    assert_ne!(a.output, c.output);
}

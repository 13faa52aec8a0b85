//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use toeplitz_cones::block_cones::{
    equivalence_check, min_neq_max_demo, separable_decompose, SeparableOptions,
};
use toeplitz_cones::duality::{caratheodory_decompose, pair, truncate_symbol};
use toeplitz_cones::entanglement::{
    build_xi, certify_entangled, choi_map_demo, purity_search, SeparabilityVerdict,
};
use toeplitz_cones::fejer_riesz::{convolution_check, factor_matrix, BauerOptions};
use toeplitz_cones::hardy::{circle_minimum, truncation, CIRCLE_GRID};
use toeplitz_cones::linalg::c;
use toeplitz_cones::sampling::{self, Rng64};
use toeplitz_cones::toeplitz::{basis_r, pure_atom, BlockToeplitz, ToeplitzMat};
use toeplitz_cones::trig::{BlockTrigPoly, TrigPoly};
use toeplitz_cones::Tolerance;

type Outcome = Result<String, String>;
type Criterion = Box<dyn FnOnce(&mut Rng64) -> Outcome>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn duality_identity(rng: &mut Rng64) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let lambda = sampling::unit_point(rng);
        let d = rng.random_range(0..n);
        let f = sampling::trig_poly(rng, d);
        let value = pair(&pure_atom(n, lambda).unwrap(), &f).unwrap();
        let direct = f.eval(lambda).unwrap();
        worst = worst.max((value - direct).norm() / (1.0 + direct.norm()));
    }
    let elapsed = start.elapsed();
    check(
        worst < 1e-10 && elapsed < Duration::from_secs(1),
        format!("worst |pair - f(lambda)| = {worst:.2e}, 1000 pairs in {elapsed:.2?}"),
    )
}

fn basis_duality() -> Outcome {
    let mut failures = 0;
    let mut cases = 0;
    for n in 1..=8usize {
        let b = n as isize - 1;
        for k in -b..=b {
            let r = basis_r(n, k).unwrap();
            for j in -b..=b {
                let value = pair(&r, &TrigPoly::chi(j)).unwrap();
                let expected = if j == -k { c(1.0, 0.0) } else { c(0.0, 0.0) };
                cases += 1;
                if value != expected {
                    failures += 1;
                }
            }
        }
    }
    check(failures == 0, format!("{failures} inexact of {cases} pairings"))
}

fn fejer_riesz_round_trip(rng: &mut Rng64) -> Outcome {
    let mut worst = 0.0f64;
    let mut times = Vec::new();
    for _ in 0..200 {
        let m = rng.random_range(1..=3);
        let d = rng.random_range(0..=5);
        let h = sampling::analytic_factor(rng, m, d);
        let f = BlockTrigPoly::from_analytic_factor(&h).unwrap();
        let start = Instant::now();
        let factor = factor_matrix(&f, &tol(), BauerOptions::default()).unwrap();
        times.push(start.elapsed());
        worst = worst.max(convolution_check(&factor.coeffs, &f));
    }
    let med = median(times);
    check(
        worst < 1e-7 && med < Duration::from_millis(500),
        format!("worst convolution residual {worst:.2e}, median time {med:.2?}"),
    )
}

fn pairing_equivalence(rng: &mut Rng64) -> Outcome {
    let mut disagreements = 0;
    let mut witnesses = 0;
    for i in 0..100 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=4);
        let margin = rng.random_range(0.05..1.0);
        let floor = if i % 2 == 0 { margin } else { -margin };
        let t = sampling::block_toeplitz_with_floor(rng, n, m, floor);
        let report = equivalence_check(&t, 500, rng, &tol()).unwrap();
        if !report.agree || report.min_psd.psd != (floor > 0.0) {
            disagreements += 1;
        }
        if report.witness_form.is_some_and(|q| q < 0.0) {
            witnesses += 1;
        }
    }
    check(
        disagreements == 0 && witnesses == 50,
        format!("{disagreements} disagreements on 100 instances, {witnesses}/50 witnesses negative at 1"),
    )
}

fn caratheodory(rng: &mut Rng64) -> Outcome {
    let mut failures = 0;
    let (mut worst_res, mut worst_circle) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let n = rng.random_range(1..=8);
        let floor = if i % 4 == 0 { 0.0 } else { rng.random_range(0.0..1.0) };
        let t = sampling::toeplitz_with_floor(rng, n, floor);
        let measure = caratheodory_decompose(&t, &tol()).unwrap();
        let res = measure.residual(&BlockToeplitz::from(&t));
        let circ = measure
            .atoms
            .iter()
            .map(|a| (a.lambda.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        worst_res = worst_res.max(res);
        worst_circle = worst_circle.max(circ);
        if measure.len() > 2 * n - 1 || circ > 1e-8 || res >= 1e-8 {
            failures += 1;
        }
    }
    check(
        failures == 0,
        format!("{failures} failures; worst residual {worst_res:.2e}, worst | |lambda| - 1 | {worst_circle:.2e}"),
    )
}

fn gurvits(rng: &mut Rng64) -> Outcome {
    let opts = SeparableOptions {
        epsilon: 1e-3,
        tol: 1e-6,
        ..SeparableOptions::default()
    };
    let mut failures = 0;
    let (mut worst_res, mut worst_eig) = (0.0f64, f64::INFINITY);
    let mut slowest = Duration::ZERO;
    for _ in 0..50 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=4);
        let floor = rng.random_range(0.1..0.5);
        let t = sampling::block_toeplitz_with_floor(rng, n, m, floor);
        let start = Instant::now();
        match separable_decompose(&t, &opts, &tol()) {
            Ok(d) => {
                let elapsed = start.elapsed();
                slowest = slowest.max(elapsed);
                let eig = d.atoms.min_weight_eig();
                worst_res = worst_res.max(d.residual);
                worst_eig = worst_eig.min(eig);
                if d.residual >= 1e-6 || eig < -1e-10 || elapsed >= Duration::from_secs(10) {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    check(
        failures == 0,
        format!("{failures} failures; worst residual {worst_res:.2e}, min weight eigenvalue {worst_eig:.2e}, slowest {slowest:.2?}"),
    )
}

fn min_neq_max() -> Outcome {
    let r = min_neq_max_demo(1024).unwrap();
    let delta = r.certificate.certified_margin;
    check(
        delta > 0.0 && r.obstruction_max < -0.01,
        format!(
            "floor {:.6}, certified margin {delta:.6}, max obstruction eigenvalue {:.6}",
            r.certificate.floor, r.obstruction_max
        ),
    )
}

fn xi_certificate() -> Outcome {
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let cert = certify_entangled(&build_xi(n).unwrap(), 1024, 1e-10).unwrap();
        worst = worst.max(cert.rank_profile / n as f64);
        let expected = if n == 1 {
            SeparabilityVerdict::Separable
        } else {
            SeparabilityVerdict::Entangled
        };
        if cert.verdict != expected || cert.rank_profile >= 1e-10 * n as f64 {
            bad.push(n);
        }
    }
    check(
        bad.is_empty(),
        format!("wrong orders {bad:?}; worst second eigenvalue / n {worst:.2e}"),
    )
}

fn purity(rng: &mut Rng64) -> Outcome {
    let mut worst = 0.0f64;
    let mut violations = 0;
    for n in [2, 3] {
        let r = purity_search(n, 1000, rng, 1e-10, 1e-6).unwrap();
        worst = worst.max(r.worst_discrepancy);
        violations += r.violations;
    }
    check(
        worst < 1e-6 && violations == 0,
        format!("worst proportionality deviation {worst:.2e}, {violations} violations"),
    )
}

fn hardy_floor() -> Outcome {
    let f = TrigPoly::new(1, vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]).unwrap();
    let mut worst = 0.0f64;
    for n in [8, 32, 128] {
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        worst = worst.max((truncation(&f, n).unwrap().min_eig().unwrap() - exact).abs());
    }
    let g = TrigPoly::new(1, vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let t2 = truncate_symbol(&g, 2).unwrap();
    let t2_psd = t2.is_psd(&tol()).unwrap().psd;
    let m = circle_minimum(&g, CIRCLE_GRID, 1e-12).unwrap();
    let enclosed = (m.lower + 1.0).abs() <= 1e-9 && (m.upper + 1.0).abs() <= 1e-9;
    check(
        worst < 1e-10 && t2_psd && enclosed,
        format!(
            "worst floor error {worst:.2e}; 2x2 section PSD {t2_psd}; circle minimum in [{:.12}, {:.12}]",
            m.lower, m.upper
        ),
    )
}

fn choi(rng: &mut Rng64) -> Outcome {
    let id = choi_map_demo(&ToeplitzMat::identity(3), &tol()).unwrap();
    let eig_err = id
        .multiplier_eigenvalues
        .iter()
        .zip([0.0, 3.0, 3.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut inexact = 0;
    let mut not_psd = 0;
    for _ in 0..100 {
        let x = sampling::toeplitz(rng, 3);
        if choi_map_demo(&x, &tol()).unwrap().agreement != 0.0 {
            inexact += 1;
        }
        let floor = rng.random_range(0.0..1.0);
        let p = sampling::toeplitz_with_floor(rng, 3, floor);
        if !choi_map_demo(&p, &tol()).unwrap().psi_psd.is_some_and(|r| r.psd) {
            not_psd += 1;
        }
    }
    check(
        eig_err <= 1e-12 && inexact == 0 && not_psd == 0,
        format!("eigenvalue error {eig_err:.2e}; {inexact}/100 inexact; {not_psd}/100 not PSD"),
    )
}

fn write_inputs(dir: &Path) {
    let files = [
        ("identity.json", r#"{"n": 3, "symbols": [[0,0],[0,0],[1,0],[0,0],[0,0]]}"#),
        ("t.json", r#"{"n": 3, "symbols": [[0.25,0],[0.5,0],[1,0],[0.5,0],[0.25,0]]}"#),
        ("block.json", r#"{"n": 2, "m": 2, "symbols": [
            [[[0.1,0],[0,0]],[[0,0],[0.1,0]]],
            [[[1,0],[0,0]],[[0,0],[1,0]]],
            [[[0.1,0],[0,0]],[[0,0],[0.1,0]]]]}"#),
        ("f.json", r#"{"d": 1, "coeffs": [[1,0],[2,0],[1,0]]}"#),
        ("pair.json", r#"{"lambda": [0.6, 0.8], "f": {"d": 1, "coeffs": [[1,0],[2,0],[3,0]]}}"#),
    ];
    for (name, body) in files {
        fs::write(dir.join(name), body).unwrap();
    }
}

fn sweep(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let bin = env!("CARGO_BIN_EXE_toeplitz-cones");
    let j = |name: &str| dir.join(name).display().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["psd".into(), "--json".into(), j("identity.json")],
        vec!["psd".into(), "--json".into(), j("block.json")],
        vec!["pair".into(), "--json".into(), j("pair.json")],
        vec!["factorize".into(), "--json".into(), j("f.json")],
        vec!["caratheodory".into(), "--json".into(), j("t.json")],
        vec!["separate".into(), "--json".into(), j("block.json"), "--eps".into(), "0.01".into()],
        vec!["equiv-check".into(), "--instances".into(), "20".into(), "--trials".into(), "50".into(), "--seed".into(), "7".into()],
        vec!["counterexample".into(), "minmax".into(), "--grid".into(), "256".into()],
        vec!["xi".into(), "--n".into(), "4".into()],
        vec!["choi-demo".into(), "--seed".into(), "3".into()],
        vec!["hardy".into(), "--json".into(), j("f.json"), "--sizes".into(), "8,16,32".into()],
        vec!["hardy".into(), "--json".into(), j("f.json"), "--csv".into()],
        vec!["fourier0".into(), "--p".into(), "7".into(), "--json".into(), j("f.json")],
    ];
    runs.into_iter()
        .map(|args| {
            let out = Command::new(bin).args(&args).output().unwrap();
            let mut bytes = out.stdout;
            bytes.extend(format!("exit {:?}", out.status.code()).into_bytes());
            (args.join(" "), bytes)
        })
        .collect()
}

fn determinism() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-cli");
    fs::create_dir_all(&dir).unwrap();
    write_inputs(&dir);
    let first = sweep(&dir);
    let second = sweep(&dir);
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| a.1 != b.1)
        .map(|(a, _)| a.0.as_str())
        .collect();
    let failed: Vec<&str> = first
        .iter()
        .filter(|(_, b)| !b.ends_with(b"exit Some(0)"))
        .map(|(a, _)| a.as_str())
        .collect();
    check(
        differing.is_empty() && failed.is_empty(),
        format!("{} commands; differing {differing:?}; nonzero exit {failed:?}", first.len()),
    )
}

fn main() {
    let mut rng = sampling::rng(20_240_601);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("duality identity", Box::new(duality_identity)),
        ("basis duality", Box::new(|_| basis_duality())),
        ("Fejer-Riesz round trip", Box::new(fejer_riesz_round_trip)),
        ("pairing equivalence", Box::new(pairing_equivalence)),
        ("Caratheodory decomposition", Box::new(caratheodory)),
        ("separable decomposition", Box::new(gurvits)),
        ("min != max", Box::new(|_| min_neq_max())),
        ("xi certificate", Box::new(|_| xi_certificate())),
        ("purity search", Box::new(purity)),
        ("Hardy floor", Box::new(|_| hardy_floor())),
        ("Choi demo", Box::new(choi)),
        ("CLI determinism", Box::new(|_| determinism())),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&mut rng);
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

//! Command-line front end: argument parsing, dispatch, and report emission.
//! [`run`] is pure apart from reading input files, so two runs with the same
//! arguments produce the same bytes.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::block_cones::{
    self, equivalence_check, min_neq_max_demo, separable_decompose, EquivalenceReport,
    MinMaxReport, SeparableOptions,
};
use crate::duality::{caratheodory_decompose, pair, AtomicMeasure};
use crate::entanglement::{self, ChoiReport, EntanglementCertificate, SeparabilityVerdict};
use crate::error::{Error, Result};
use crate::fejer_riesz::{self, BauerOptions};
use crate::hardy::{self, FloorTrend};
use crate::report::{self, ErrorReport, Report};
use crate::sampling;
use crate::toeplitz::{pure_atom, BlockToeplitz, ToeplitzMat};
use crate::tolerance::Tolerance;
use crate::trig::{fourier_coeff_via_roots, BlockTrigPoly, TrigPoly};

#[derive(Debug, Clone, Parser)]
#[command(name = "toeplitz-cones", version, about = "Positivity, duality and tensor cones of Toeplitz matrices")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Residual tolerance.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_RESIDUAL)]
    pub tol: f64,
    /// Eigenvalue slack for PSD tests.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_EIG)]
    pub eig_tol: f64,
    /// Grid size (meaning depends on the command).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Input JSON file.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Eigenvalue test of a (block) Toeplitz matrix.
    Psd,
    /// Pairing of a Toeplitz matrix (or the atom at `lambda`) with a trigonometric polynomial.
    Pair,
    /// Fejér-Riesz factorization `F = H* H`.
    Factorize,
    /// Atomic decomposition of a PSD Toeplitz matrix.
    Caratheodory,
    /// Grid-separable decomposition of `T + eps I`.
    Separate {
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
    },
    /// Compare the eigenvalue test with the Schur-pairing test on random instances.
    EquivCheck {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 4)]
        max_m: usize,
    },
    /// Reproduce a counterexample.
    Counterexample {
        #[command(subcommand)]
        which: Counterexample,
    },
    /// Entanglement certificate of the maximally entangled Toeplitz matrix.
    Xi {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
    },
    /// The Choi map on Toeplitz matrices as a Schur multiplier.
    ChoiDemo {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Spectral floors of finite Toeplitz sections.
    Hardy {
        /// Symbol JSON (alternative to --json).
        #[arg(long)]
        symbol: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
        sizes: Vec<usize>,
        /// Emit a CSV table instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Constant coefficient from values at p-th roots of unity.
    Fourier0 {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Counterexample {
    /// A min-positive two-level symbol outside the maximal cone.
    Minmax,
}

/// Exit status and rendered report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub output: String,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Psd => "psd",
            Command::Pair => "pair",
            Command::Factorize => "factorize",
            Command::Caratheodory => "caratheodory",
            Command::Separate { .. } => "separate",
            Command::EquivCheck { .. } => "equiv-check",
            Command::Counterexample { .. } => "counterexample",
            Command::Xi { .. } => "xi",
            Command::ChoiDemo { .. } => "choi-demo",
            Command::Hardy { .. } => "hardy",
            Command::Fourier0 { .. } => "fourier0",
        }
    }
}

struct Ctx<'a> {
    global: &'a GlobalArgs,
    tol: Tolerance,
}

impl Ctx<'_> {
    fn emit<T: Serialize>(&self, command: &str, code: u8, verdict: &str, basis: &str, result: T) -> Result<Outcome> {
        let report = Report {
            command: command.into(),
            verdict: verdict.into(),
            basis: basis.into(),
            seed: self.global.seed,
            tolerance: self.tol,
            result,
        };
        Ok(Outcome {
            code,
            output: report::to_json(&report)?,
        })
    }

    fn input<T: DeserializeOwned>(&self, path: Option<&Path>) -> Result<T> {
        let path = path
            .or(self.global.json.as_deref())
            .ok_or_else(|| Error::Precondition("this command needs --json <path>".into()))?;
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// A scalar or block Toeplitz matrix on input.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum AnyToeplitz {
    Block(BlockToeplitz),
    Scalar(ToeplitzMat),
}

impl AnyToeplitz {
    fn into_block(self) -> BlockToeplitz {
        match self {
            AnyToeplitz::Block(b) => b,
            AnyToeplitz::Scalar(t) => BlockToeplitz::from(&t),
        }
    }
}

/// A scalar or matrix trigonometric polynomial on input.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum AnyTrigPoly {
    Block(BlockTrigPoly),
    Scalar(TrigPoly),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairInput {
    t: Option<ToeplitzMat>,
    lambda: Option<Complex64>,
    n: Option<usize>,
    f: TrigPoly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdResult {
    pub n: usize,
    pub m: usize,
    pub psd: bool,
    pub min_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub value: Complex64,
    /// `f(lambda)`, when the matrix is the atom at `lambda`.
    pub f_at_lambda: Option<Complex64>,
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizeResult {
    #[serde(rename = "H")]
    pub h: BlockTrigPoly,
    pub residual: f64,
    pub iterations: usize,
    pub regularization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaratheodoryResult {
    pub measure: AtomicMeasure,
    pub atoms: usize,
    pub residual: f64,
    /// `max_j | |lambda_j| - 1 |`.
    pub circle_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparateResult {
    pub measure: AtomicMeasure,
    pub epsilon: f64,
    pub residual: f64,
    pub grid: usize,
    pub iterations: usize,
    pub min_weight_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivInstance {
    pub n: usize,
    pub m: usize,
    pub report: EquivalenceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivResult {
    pub instances: Vec<EquivInstance>,
    pub disagreements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiSweep {
    pub identity: ChoiReport,
    pub samples: usize,
    /// Largest `||psi(x) - x o g||_F` over random Toeplitz `x`.
    pub max_agreement_error: f64,
    /// Random PSD Toeplitz `x` with `psi(x)` PSD.
    pub psd_preserved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fourier0Result {
    pub p: u64,
    pub value: Complex64,
    pub coefficient: Complex64,
    pub deviation: f64,
}

/// Parses nothing; runs the already parsed command.
pub fn run(cli: &Cli) -> Outcome {
    let name = cli.command.name();
    let result = Tolerance::new(cli.global.eig_tol, cli.global.tol).and_then(|tol| {
        let ctx = Ctx {
            global: &cli.global,
            tol,
        };
        dispatch(&ctx, &cli.command)
    });
    match result {
        Ok(o) => o,
        Err(e) => {
            let code = match e {
                // a PSD precondition that fails is an established negative verdict
                Error::NotPsd { .. } => 1,
                _ => 2,
            };
            let output = report::to_json(&ErrorReport {
                command: name.into(),
                error: e.to_string(),
            })
            .unwrap_or_else(|_| format!("{{\"command\": \"{name}\"}}\n"));
            Outcome { code, output }
        }
    }
}

fn dispatch(ctx: &Ctx<'_>, command: &Command) -> Result<Outcome> {
    let name = command.name();
    let tol = &ctx.tol;
    match command {
        Command::Psd => {
            let t = ctx.input::<AnyToeplitz>(None)?.into_block();
            let rep = block_cones::min_psd_block(&t, tol)?;
            let result = PsdResult {
                n: t.order(),
                m: t.block_size(),
                psd: rep.psd,
                min_eig: rep.min_eig,
            };
            let (code, verdict) = if rep.psd { (0, "psd") } else { (1, "not_psd") };
            ctx.emit(name, code, verdict, "eigenvalue test of the materialized matrix", result)
        }
        Command::Pair => {
            let input: PairInput = ctx.input(None)?;
            let (t, lambda) = match (input.t, input.lambda) {
                (Some(t), None) => (t, None),
                (None, Some(l)) => {
                    let n = input.n.unwrap_or(input.f.degree_bound() + 1);
                    (pure_atom(n, l)?, Some(l))
                }
                _ => {
                    return Err(Error::Malformed(
                        "pair input needs exactly one of \"t\" and \"lambda\"".into(),
                    ))
                }
            };
            let value = pair(&t, &input.f)?;
            let f_at_lambda = lambda.map(|l| input.f.eval(l)).transpose()?;
            let result = PairResult {
                value,
                deviation: f_at_lambda.map(|v| (v - value).norm()),
                f_at_lambda,
            };
            ctx.emit(name, 0, "evaluated", "the atom at lambda pairs with f to give f(lambda)", result)
        }
        Command::Factorize => {
            let factor = match ctx.input::<AnyTrigPoly>(None)? {
                AnyTrigPoly::Scalar(f) => fejer_riesz::factor_scalar(&f, tol)?,
                AnyTrigPoly::Block(f) if f.block_size() == 1 => {
                    let scalar = TrigPoly::from_fn(f.degree_bound(), |k| f.coeff(k)[(0, 0)]);
                    fejer_riesz::factor_scalar(&scalar, tol)?
                }
                AnyTrigPoly::Block(f) => fejer_riesz::factor_matrix(&f, tol, BauerOptions::default())?,
            };
            let result = FactorizeResult {
                h: factor.as_block_poly(),
                residual: factor.residual,
                iterations: factor.iterations,
                regularization: factor.regularization,
            };
            ctx.emit(name, 0, "factored", "a PSD-valued trigonometric polynomial is H* H with H analytic", result)
        }
        Command::Caratheodory => {
            let t: ToeplitzMat = ctx.input(None)?;
            let measure = caratheodory_decompose(&t, tol)?;
            let result = CaratheodoryResult {
                atoms: measure.len(),
                residual: measure.residual(&BlockToeplitz::from(&t)),
                circle_deviation: measure
                    .atoms
                    .iter()
                    .map(|a| (a.lambda.norm() - 1.0).abs())
                    .fold(0.0, f64::max),
                measure,
            };
            ctx.emit(name, 0, "decomposed", "a PSD Toeplitz matrix is a nonnegative combination of rank-one atoms", result)
        }
        Command::Separate { eps, max_iter } => {
            let t = ctx.input::<AnyToeplitz>(None)?.into_block();
            let opts = SeparableOptions {
                epsilon: *eps,
                grid: ctx.global.grid,
                tol: tol.residual_tol,
                max_iter: *max_iter,
                record_trace: false,
            };
            let d = separable_decompose(&t, &opts, tol)?;
            let result = SeparateResult {
                min_weight_eig: d.atoms.min_weight_eig(),
                measure: d.atoms,
                epsilon: d.epsilon,
                residual: d.residual,
                grid: d.grid,
                iterations: d.iterations,
            };
            ctx.emit(name, 0, "separable", "every PSD block Toeplitz matrix is separable; T + eps I is decomposed on a grid", result)
        }
        Command::EquivCheck {
            instances,
            trials,
            max_n,
            max_m,
        } => {
            let mut rng = sampling::rng(ctx.global.seed);
            let mut out = Vec::with_capacity(*instances);
            for i in 0..*instances {
                let n = rng.random_range(1..=*max_n);
                let m = rng.random_range(1..=*max_m);
                let margin = rng.random_range(0.05..1.0);
                let floor = if i % 2 == 0 { margin } else { -margin };
                let t = sampling::block_toeplitz_with_floor(&mut rng, n, m, floor);
                let report = equivalence_check(&t, *trials, &mut rng, tol)?;
                out.push(EquivInstance { n, m, report });
            }
            let disagreements = out.iter().filter(|e| !e.report.agree).count();
            let (code, verdict) = if disagreements == 0 { (0, "equivalent") } else { (1, "disagreement") };
            let result = EquivResult {
                instances: out,
                disagreements,
            };
            ctx.emit(name, code, verdict, "T is PSD iff sum_k tau_{-k} o a_k is PSD for every PSD-valued F", result)
        }
        Command::Counterexample {
            which: Counterexample::Minmax,
        } => {
            let report: MinMaxReport = min_neq_max_demo(ctx.global.grid.unwrap_or(1024))?;
            let (code, verdict) = if report.separates() { (0, "min_neq_max") } else { (2, "inconclusive") };
            ctx.emit("counterexample minmax", code, verdict, "a min-positive two-level symbol whose averaged obstruction has no PSD member", report)
        }
        Command::Xi { n, samples } => {
            let x = entanglement::build_xi(*n)?;
            let cert: EntanglementCertificate = entanglement::certify_entangled(&x, *samples, tol.eig_tol)?;
            let (code, verdict) = match cert.verdict {
                SeparabilityVerdict::Entangled => (0, "entangled"),
                SeparabilityVerdict::Separable => (1, "separable"),
            };
            let basis = cert.basis.clone();
            ctx.emit(name, code, verdict, &basis, cert)
        }
        Command::ChoiDemo { samples } => {
            let identity = match &ctx.global.json {
                Some(_) => entanglement::choi_map_demo(&ctx.input::<ToeplitzMat>(None)?, tol)?,
                None => entanglement::choi_map_demo(&ToeplitzMat::identity(3), tol)?,
            };
            let mut rng = sampling::rng(ctx.global.seed);
            let mut max_agreement_error = 0.0f64;
            let mut psd_preserved = 0;
            for _ in 0..*samples {
                let x = sampling::toeplitz(&mut rng, 3);
                max_agreement_error = max_agreement_error.max(entanglement::choi_map_demo(&x, tol)?.agreement);
                let floor = rng.random_range(0.0..1.0);
                let p = sampling::toeplitz_with_floor(&mut rng, 3, floor);
                if entanglement::choi_map_demo(&p, tol)?.psi_psd.is_some_and(|r| r.psd) {
                    psd_preserved += 1;
                }
            }
            let ok = max_agreement_error == 0.0 && psd_preserved == *samples;
            let basis = identity.basis.clone();
            let result = ChoiSweep {
                identity,
                samples: *samples,
                max_agreement_error,
                psd_preserved,
            };
            ctx.emit(name, if ok { 0 } else { 1 }, if ok { "schur_multiplier" } else { "mismatch" }, &basis, result)
        }
        Command::Hardy { symbol, sizes, csv } => {
            let f: TrigPoly = ctx.input(symbol.as_deref())?;
            let trend: FloorTrend = hardy::spectral_floor_trend(&f, sizes)?;
            if *csv {
                let mut out = String::from("size,lambda_min\n");
                for (n, v) in trend.sizes.iter().zip(&trend.floors) {
                    out.push_str(&format!("{n},{v:.16e}\n"));
                }
                return Ok(Outcome { code: 0, output: out });
            }
            ctx.emit(name, 0, "trend", "the essential spectrum of T_f is f(S^1), so section floors decrease to min f", trend)
        }
        Command::Fourier0 { p } => {
            let f: TrigPoly = ctx.input(None)?;
            let value = fourier_coeff_via_roots(&f, *p)?;
            let coefficient = f.coeff(0);
            let result = Fourier0Result {
                p: *p,
                value,
                coefficient,
                deviation: (value - coefficient).norm(),
            };
            ctx.emit(name, 0, "evaluated", "averaging over p-th roots of unity recovers the constant coefficient when p exceeds the degree", result)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> std::result::Result<Outcome, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Ok(run(&Cli::try_parse_from(args)?))
}

//! The pairing between Toeplitz matrices and trigonometric polynomials,
//! the truncation map `f -> t_f`, and the Carathéodory decomposition of a
//! positive Toeplitz matrix into rank-one atoms `Lambda(lambda)`.
//!
//! The pairing `<t, f> = sum_k tau_{-k} a_k` sends `Lambda(lambda)` to point
//! evaluation at `lambda` and `r_k` to the coefficient functional of `chi_{-k}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::toeplitz::{pure_atom, BlockToeplitz, ToeplitzMat};
use crate::tolerance::Tolerance;
use crate::trig::{circle, unit_pow, TrigPoly};

/// A Toeplitz matrix viewed as a linear functional on trigonometric
/// polynomials of degree below its order.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunctional {
    pub matrix: ToeplitzMat,
}

impl DualFunctional {
    pub fn new(matrix: ToeplitzMat) -> Self {
        Self { matrix }
    }

    pub fn apply(&self, f: &TrigPoly) -> Result<Complex64> {
        pair(&self.matrix, f)
    }
}

/// `sum_{k} tau_{-k} a_k` for `f = sum_k a_k chi_k`.
pub fn pair(t: &ToeplitzMat, f: &TrigPoly) -> Result<Complex64> {
    let bound = t.order() - 1;
    if f.degree_bound() > bound {
        return Err(Error::DegreeMismatch {
            degree: f.degree_bound(),
            bound,
        });
    }
    let d = f.degree_bound() as isize;
    Ok((-d..=d).map(|k| t.symbol(-k) * f.coeff(k)).sum())
}

/// `t_f = sum_k f^(k) r_k`, the leading `n x n` section of the Toeplitz
/// operator with symbol `f`.
pub fn truncate_symbol(f: &TrigPoly, order: usize) -> Result<ToeplitzMat> {
    if order == 0 {
        return Err(Error::InvalidOrder("order must be positive".into()));
    }
    if f.degree_bound() > order - 1 {
        return Err(Error::DegreeMismatch {
            degree: f.degree_bound(),
            bound: order - 1,
        });
    }
    if !f.is_selfadjoint(1e-12 * (1.0 + f.norm())) {
        return Err(Error::Precondition("symbol must be selfadjoint".into()));
    }
    Ok(ToeplitzMat::from_fn(order, |k| f.coeff(k)))
}

/// `f^(k)`, the dual basis functional applied to `f`.
pub fn dual_basis_eval(k: isize, f: &TrigPoly) -> Result<Complex64> {
    if k.unsigned_abs() > f.degree_bound() {
        return Err(Error::OffsetOutOfRange {
            offset: k,
            bound: f.degree_bound(),
        });
    }
    Ok(f.coeff(k))
}

/// One atom `w * Lambda(lambda)` (scalar) or `Lambda(lambda) (x) w` (block).
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub lambda: Complex64,
    pub weight: CMat,
}

/// A finite measure on the circle with nonnegative or PSD weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "crate::wire::AtomicMeasureJson", try_from = "crate::wire::AtomicMeasureJson")]
pub struct AtomicMeasure {
    pub block_size: usize,
    pub atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(block_size: usize, atoms: Vec<Atom>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| a.weight.shape() != (block_size, block_size)) {
            return Err(Error::ShapeMismatch(format!(
                "atom weight of shape {:?}, expected {block_size}x{block_size}",
                a.weight.shape()
            )));
        }
        Ok(Self { block_size, atoms })
    }

    pub fn scalar(atoms: impl IntoIterator<Item = (Complex64, f64)>) -> Self {
        Self {
            block_size: 1,
            atoms: atoms
                .into_iter()
                .map(|(lambda, w)| Atom {
                    lambda,
                    weight: CMat::from_element(1, 1, c(w, 0.0)),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Scalar weights (the `(0,0)` entries).
    pub fn scalar_weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight[(0, 0)].re).collect()
    }

    /// `sum_j lambda_j^{-k} w_j`, the `k`-th symbol of the reassembled matrix.
    pub fn moment(&self, k: isize) -> CMat {
        let mut out = CMat::zeros(self.block_size, self.block_size);
        for a in &self.atoms {
            out += &a.weight * unit_pow(a.lambda, -k);
        }
        out
    }

    /// `sum_j Lambda(lambda_j) (x) w_j` as an order-`n` block Toeplitz matrix.
    pub fn reassemble(&self, order: usize) -> BlockToeplitz {
        BlockToeplitz::from_fn(order, self.block_size, |k| self.moment(k))
    }

    /// Largest symbol-wise Frobenius deviation from `target`.
    pub fn residual(&self, target: &BlockToeplitz) -> f64 {
        let b = target.order() as isize - 1;
        (-b..=b)
            .map(|k| (self.moment(k) - target.symbol(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Total mass `sum_j w_j`.
    pub fn total(&self) -> CMat {
        self.moment(0)
    }

    /// Smallest eigenvalue over all weights (`+inf` when empty).
    pub fn min_weight_eig(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| linalg::min_eig_hermitian_part(&a.weight))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Roots of the kernel polynomial may sit this far from the circle before
/// the decomposition is declared failed.
pub const ROOT_CIRCLE_SLACK: f64 = 1e-6;

/// Relative eigenvalue threshold separating the kernel from the range.
const RANK_THRESHOLD: f64 = 1e-9;

/// Writes a PSD Toeplitz matrix as `sum_j w_j Lambda(lambda_j)` with
/// `w_j >= 0`, `|lambda_j| = 1` and at most `2n - 1` atoms.
///
/// A singular input is handled by the kernel method: the roots of
/// `p(z) = sum_k c_k z^k` for a kernel vector `c` of the smallest singular
/// leading section are the atoms. A nonsingular input is split as
/// `(t - sigma I) + sigma I` with `sigma` the smallest eigenvalue; the
/// identity part sits uniformly on the `n`-th roots of unity.
pub fn caratheodory_decompose(t: &ToeplitzMat, tol: &Tolerance) -> Result<AtomicMeasure> {
    let n = t.order();
    let dense = linalg::symmetrize(&t.matrix())?;
    let (values, _) = linalg::eigh_unchecked(dense);
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let sigma_min = values[0];
    if sigma_min < -tol.eig_tol * scale.max(1.0) {
        return Err(Error::NotPsd { min_eig: sigma_min });
    }
    if scale == 0.0 {
        return Ok(AtomicMeasure::scalar([]));
    }
    if n == 1 {
        return Ok(AtomicMeasure::scalar([(c(1.0, 0.0), t.symbol(0).re)]));
    }

    let sigma = if sigma_min > RANK_THRESHOLD * scale { sigma_min } else { 0.0 };
    let singular = ToeplitzMat::from_fn(n, |k| {
        if k == 0 {
            t.symbol(0) - sigma
        } else {
            t.symbol(k)
        }
    });

    let mut atoms = singular_atoms(&singular, scale)?;
    if sigma > 0.0 {
        let w = sigma / n as f64;
        atoms.extend(
            (0..n).map(|j| (circle(std::f64::consts::TAU * j as f64 / n as f64), w)),
        );
    }
    let measure = AtomicMeasure::scalar(atoms);
    let residual = measure.residual(&BlockToeplitz::from(t));
    if residual > tol.residual_tol * scale.max(1.0) {
        return Err(Error::RootFinding(format!(
            "reassembly residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(measure)
}

/// Atoms of a singular PSD Toeplitz matrix (kernel method).
fn singular_atoms(t: &ToeplitzMat, scale: f64) -> Result<Vec<(Complex64, f64)>> {
    let n = t.order();
    let (values, _) = linalg::eigh_unchecked(linalg::symmetrize(&t.matrix())?);
    let rank = values.iter().filter(|&&v| v > RANK_THRESHOLD * scale).count();
    if rank == 0 {
        return Ok(Vec::new());
    }
    if rank >= n {
        return Err(Error::Precondition(
            "kernel method needs a singular Toeplitz matrix".into(),
        ));
    }
    // leading (rank+1) section: one-dimensional kernel, degree-rank polynomial
    let section = ToeplitzMat::from_fn(rank + 1, |k| t.symbol(k));
    let (_, vectors) = linalg::eigh_unchecked(linalg::symmetrize(&section.matrix())?);
    let kernel: Vec<Complex64> = vectors.column(0).iter().copied().collect();
    let roots = linalg::poly_roots(&kernel)?;
    if roots.len() != rank {
        return Err(Error::RootFinding(format!(
            "kernel polynomial has {} roots, expected {rank}",
            roots.len()
        )));
    }
    let mut lambdas = Vec::with_capacity(rank);
    for r in roots {
        let off = (r.norm() - 1.0).abs();
        if off > ROOT_CIRCLE_SLACK {
            return Err(Error::RootFinding(format!(
                "kernel root {r} lies {off:e} away from the unit circle"
            )));
        }
        lambdas.push(r / r.norm());
    }
    let weights = moment_weights(t, &lambdas)?;
    let floor = -1e-12 * scale.max(1.0);
    if let Some(w) = weights.iter().find(|&&w| w < floor) {
        return Err(Error::RootFinding(format!(
            "negative atom weight {w:e}: roots misidentified"
        )));
    }
    Ok(lambdas
        .into_iter()
        .zip(weights)
        .map(|(l, w)| (l, w.max(0.0)))
        .collect())
}

/// Real least squares for `sum_j w_j lambda_j^{-k} = tau_k`, `k = 0..n-1`,
/// with real and imaginary parts stacked.
fn moment_weights(t: &ToeplitzMat, lambdas: &[Complex64]) -> Result<Vec<f64>> {
    let n = t.order();
    let r = lambdas.len();
    let mut a = DMatrix::<f64>::zeros(2 * n, r);
    let mut b = DVector::<f64>::zeros(2 * n);
    for k in 0..n {
        for (j, &l) in lambdas.iter().enumerate() {
            let v = unit_pow(l, -(k as isize));
            a[(2 * k, j)] = v.re;
            a[(2 * k + 1, j)] = v.im;
        }
        let tau = t.symbol(k as isize);
        b[2 * k] = tau.re;
        b[2 * k + 1] = tau.im;
    }
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::RootFinding(format!("weight least squares failed: {e}")))?;
    Ok(x.iter().copied().collect())
}

/// Convenience: `sum_j w_j Lambda(lambda_j)` for a scalar measure.
pub fn reassemble_scalar(measure: &AtomicMeasure, order: usize) -> Result<ToeplitzMat> {
    let mut acc = ToeplitzMat::zeros(order);
    for a in &measure.atoms {
        acc = acc.add(&pure_atom(order, a.lambda)?.scale(a.weight[(0, 0)]))?;
    }
    Ok(acc)
}

//! Dense complex linear algebra shared by every module: Hermitian
//! eigensolves, PSD tests and projections, Kronecker and Schur products,
//! and polynomial root finding.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::{Tolerance, SELFADJOINT_SLACK};

pub type CMat = DMatrix<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a complex matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| c(data[i * cols + j], 0.0))
}

pub fn selfadjoint_deviation(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// Returns `(M + M*) / 2`, rejecting inputs whose skew part exceeds the
/// relative selfadjointness slack.
pub fn symmetrize(m: &CMat) -> Result<CMat> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = selfadjoint_deviation(m);
    if dev > SELFADJOINT_SLACK * m.norm() {
        return Err(Error::NotSelfAdjoint { deviation: dev });
    }
    Ok((m + m.adjoint()).scale(0.5))
}

/// Eigen-decomposition of a selfadjoint matrix, eigenvalues ascending and
/// eigenvectors in the matching columns.
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let h = symmetrize(m)?;
    Ok(eigh_unchecked(h))
}

pub(crate) fn eigh_unchecked(h: CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), h);
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMat) -> Result<Vec<f64>> {
    Ok(eigh(m)?.0)
}

/// Smallest eigenvalue of the Hermitian part of `m` (no selfadjointness check).
pub(crate) fn min_eig_hermitian_part(m: &CMat) -> f64 {
    match m.nrows() {
        0 => return 0.0,
        1 => return m[(0, 0)].re,
        2 => {
            // closed form for [[a, b], [b*, d]]
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
            let half = 0.5 * (a - d);
            return 0.5 * (a + d) - (half * half + b.norm_sqr()).sqrt();
        }
        _ => {}
    }
    let h = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn min_eig(m: &CMat) -> Result<f64> {
    let h = symmetrize(m)?;
    Ok(min_eig_hermitian_part(&h))
}

/// Verdict of a positive semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eig: f64,
}

pub fn is_psd(m: &CMat, tol: &Tolerance) -> Result<PsdReport> {
    let min_eig = min_eig(m)?;
    Ok(PsdReport {
        psd: min_eig >= -tol.eig_tol,
        min_eig,
    })
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to 0).
pub fn clip_psd(m: &CMat) -> CMat {
    let h = (m + m.adjoint()).scale(0.5);
    let n = h.nrows();
    let (values, vectors) = eigh_unchecked(h);
    let mut out = CMat::zeros(n, n);
    for (k, &v) in values.iter().enumerate() {
        if v > 0.0 {
            let col = vectors.column(k);
            out += (col * col.adjoint()).scale(v);
        }
    }
    out
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Entrywise (Schur-Hadamard) product.
pub fn schur_product(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "schur product of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.component_mul(b))
}

/// The isometry `V: e_k -> e_k (x) e_k` of `C^d` into `C^d (x) C^d`, so that
/// `A o B = V* (A (x) B) V`.
pub fn schur_isometry(d: usize) -> CMat {
    let mut v = CMat::zeros(d * d, d);
    for k in 0..d {
        v[(k * d + k, k)] = c(1.0, 0.0);
    }
    v
}

/// Spectral norm.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Numerical rank: singular values above `rel * sigma_max`.
pub fn numerical_rank(m: &CMat, rel: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * top).count()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Horner evaluation of `sum_k coeffs[k] z^k`.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::ZERO, |acc, &a| acc * z + a)
}

/// Coefficients of the derivative.
pub fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

/// All roots of `sum_k coeffs[k] z^k` (ascending coefficients), via the
/// eigenvalues of the companion matrix followed by Newton polishing.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let scale = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::RootFinding("zero polynomial".into()));
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut companion = CMat::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = c(1.0, 0.0);
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = Schur::try_new(companion, 1e-15 * scale.max(1.0), 10_000)
        .ok_or_else(|| Error::RootFinding("companion Schur iteration did not converge".into()))?;
    let eig: DVector<Complex64> = schur
        .eigenvalues()
        .ok_or_else(|| Error::RootFinding("companion eigenvalues unavailable".into()))?;
    let p = &coeffs[..=deg];
    let dp = poly_derivative(p);
    let roots = eig
        .iter()
        .map(|&z0| {
            let mut z = z0;
            let mut best = poly_eval(p, z).norm();
            for _ in 0..8 {
                let d = poly_eval(&dp, z);
                if d.norm() == 0.0 {
                    break;
                }
                let cand = z - poly_eval(p, z) / d;
                let r = poly_eval(p, cand).norm();
                if r < best && (cand - z).norm() < 1e-3 * (1.0 + z.norm()) {
                    z = cand;
                    best = r;
                } else {
                    break;
                }
            }
            z
        })
        .collect();
    Ok(roots)
}

/// Expands `prod_j (z - r_j)` into ascending coefficients.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![c(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::ZERO; p.len() + 1];
        for (k, &a) in p.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        p = next;
    }
    p
}

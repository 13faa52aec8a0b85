use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::toeplitz::BlockToeplitz;
use crate::trig::{circle, unit_pow};

/// How the outer variable of a two-level symbol is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterRealization {
    /// `x(z, w) = sum c_{k,j} z^k w^j`, a `p x p` matrix function on the torus.
    Function,
    /// `x(w)` is the order-`n` block Toeplitz matrix with symbols
    /// `tau_k(w) = sum_j c_{k,j} w^j`; it does not depend on `z`.
    Toeplitz,
}

/// `sum_{k,j} c_{k,j} chi_k (x) chi_j` with `p x p` matrix coefficients,
/// `|k| <= n - 1` and `|j| <= m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelToeplitz {
    outer: usize,
    inner: usize,
    block: usize,
    realization: OuterRealization,
    coeffs: Vec<CMat>,
}

impl TwoLevelToeplitz {
    pub fn new(
        outer: usize,
        inner: usize,
        realization: OuterRealization,
        coeffs: Vec<CMat>,
    ) -> Result<Self> {
        if outer == 0 || inner == 0 {
            return Err(Error::InvalidOrder(format!(
                "orders ({outer}, {inner}) must be positive"
            )));
        }
        let count = (2 * outer - 1) * (2 * inner - 1);
        if coeffs.len() != count {
            return Err(Error::ShapeMismatch(format!(
                "expected {count} coefficients, got {}",
                coeffs.len()
            )));
        }
        let block = coeffs[0].nrows();
        if block == 0 || coeffs.iter().any(|a| a.shape() != (block, block)) {
            return Err(Error::ShapeMismatch("coefficients must share a square shape".into()));
        }
        Ok(Self {
            outer,
            inner,
            block,
            realization,
            coeffs,
        })
    }

    pub fn from_fn(
        outer: usize,
        inner: usize,
        block: usize,
        realization: OuterRealization,
        mut f: impl FnMut(isize, isize) -> CMat,
    ) -> Self {
        assert!(outer > 0 && inner > 0 && block > 0);
        let (bn, bm) = (outer as isize - 1, inner as isize - 1);
        let mut coeffs = Vec::with_capacity((2 * outer - 1) * (2 * inner - 1));
        for k in -bn..=bn {
            for j in -bm..=bm {
                let a = f(k, j);
                assert_eq!(a.shape(), (block, block));
                coeffs.push(a);
            }
        }
        Self {
            outer,
            inner,
            block,
            realization,
            coeffs,
        }
    }

    /// Scalar coefficients.
    pub fn scalar(
        outer: usize,
        inner: usize,
        realization: OuterRealization,
        mut f: impl FnMut(isize, isize) -> Complex64,
    ) -> Self {
        Self::from_fn(outer, inner, 1, realization, |k, j| CMat::from_element(1, 1, f(k, j)))
    }

    pub fn outer_order(&self) -> usize {
        self.outer
    }

    pub fn inner_order(&self) -> usize {
        self.inner
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn realization(&self) -> OuterRealization {
        self.realization
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    fn index(&self, k: isize, j: isize) -> Option<usize> {
        let (bn, bm) = (self.outer as isize - 1, self.inner as isize - 1);
        (k.abs() <= bn && j.abs() <= bm).then(|| ((k + bn) * (2 * bm + 1) + (j + bm)) as usize)
    }

    pub fn coeff(&self, k: isize, j: isize) -> CMat {
        self.index(k, j)
            .map_or_else(|| CMat::zeros(self.block, self.block), |i| self.coeffs[i].clone())
    }

    fn pairs(&self) -> impl Iterator<Item = (isize, isize, &CMat)> {
        let (bn, bm) = (self.outer as isize - 1, self.inner as isize - 1);
        (-bn..=bn)
            .flat_map(move |k| (-bm..=bm).map(move |j| (k, j)))
            .zip(&self.coeffs)
            .map(|((k, j), a)| (k, j, a))
    }

    /// `c_{-k,-j} = c_{k,j}*` for all `k, j`.
    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        self.pairs()
            .all(|(k, j, a)| (self.coeff(-k, -j) - a.adjoint()).norm() <= tol)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * Complex64::new(s, 0.0)).collect(),
            ..self.clone()
        }
    }

    /// Frobenius norm of the coefficient array.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_squared()).sum::<f64>().sqrt()
    }

    pub(crate) fn same_shape(&self, other: &Self) -> Result<()> {
        if (self.outer, self.inner, self.block, self.realization)
            != (other.outer, other.inner, other.block, other.realization)
        {
            return Err(Error::ShapeMismatch("two-level shapes differ".into()));
        }
        Ok(())
    }

    /// `sum_k c_{k,j} z^k` for each `j`, indexed by `j + m - 1`.
    fn partial_in_z(&self, z: Complex64) -> Vec<CMat> {
        let bm = self.inner as isize - 1;
        let mut out = vec![CMat::zeros(self.block, self.block); 2 * self.inner - 1];
        for (k, j, a) in self.pairs() {
            out[(j + bm) as usize] += a * unit_pow(z, k);
        }
        out
    }

    /// The block Toeplitz matrix `sum_k r_k (x) tau_k(w)` of the Toeplitz realization.
    pub fn toeplitz_at(&self, w: Complex64) -> BlockToeplitz {
        BlockToeplitz::from_fn(self.outer, self.block, |k| {
            let bm = self.inner as isize - 1;
            let mut acc = CMat::zeros(self.block, self.block);
            for j in -bm..=bm {
                if let Some(i) = self.index(k, j) {
                    acc += &self.coeffs[i] * unit_pow(w, j);
                }
            }
            acc
        })
    }

    /// The value of the realized symbol at `(z, w)`.
    pub fn value(&self, z: Complex64, w: Complex64) -> CMat {
        match self.realization {
            OuterRealization::Function => {
                let bm = self.inner as isize - 1;
                let mut acc = CMat::zeros(self.block, self.block);
                for (j, a) in self.partial_in_z(z).iter().enumerate() {
                    acc += a * unit_pow(w, j as isize - bm);
                }
                acc
            }
            OuterRealization::Toeplitz => self.toeplitz_at(w).matrix(),
        }
    }

    /// Smallest eigenvalue of the Hermitian part of [`Self::value`].
    pub fn min_eig_at(&self, z: Complex64, w: Complex64) -> f64 {
        linalg::min_eig_hermitian_part(&self.value(z, w))
    }

    /// `L = sum (|k| + |j|) ||c_{k,j}||`, so that `lambda_min(x(z, w))` moves by
    /// at most `L (|d arg z| + |d arg w|)`.
    pub fn lipschitz(&self) -> f64 {
        self.pairs()
            .map(|(k, j, a)| (k.unsigned_abs() + j.unsigned_abs()) as f64 * linalg::op_norm(a))
            .sum()
    }
}

/// Grid lower bound for `lambda_min` over the torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinPositivityCertificate {
    pub grid: usize,
    pub floor: f64,
    pub lipschitz: f64,
    /// `floor - lipschitz * pi / grid`.
    pub certified_margin: f64,
    pub certified: bool,
    /// Angles `(arg z, arg w)` of the grid minimizer.
    pub argmin: (f64, f64),
}

/// Evaluates `lambda_min(x(z, w))` on a `G x G` torus grid and turns the
/// Lipschitz bound into a certified lower bound for the whole torus.
pub fn certify_two_level_min_positive(
    x: &TwoLevelToeplitz,
    grid: usize,
) -> Result<MinPositivityCertificate> {
    if grid == 0 {
        return Err(Error::Precondition("grid size must be positive".into()));
    }
    let scale = x.coeff_norm().max(1.0);
    if !x.is_selfadjoint(crate::tolerance::SELFADJOINT_SLACK * scale) {
        let deviation = x
            .pairs()
            .map(|(k, j, a)| (x.coeff(-k, -j) - a.adjoint()).norm())
            .fold(0.0, f64::max);
        return Err(Error::NotSelfAdjoint { deviation });
    }
    let angle = |i: usize| TAU * i as f64 / grid as f64;
    let mut floor = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    match x.realization {
        OuterRealization::Function => {
            let bm = x.inner as isize - 1;
            let wpows: Vec<Vec<Complex64>> = (0..grid)
                .map(|i| (-bm..=bm).map(|j| unit_pow(circle(angle(i)), j)).collect())
                .collect();
            let mut acc = CMat::zeros(x.block, x.block);
            for a in 0..grid {
                let parts = x.partial_in_z(circle(angle(a)));
                for (b, pw) in wpows.iter().enumerate() {
                    acc.fill(Complex64::ZERO);
                    for (part, &p) in parts.iter().zip(pw) {
                        acc.zip_apply(part, |s, v| *s += v * p);
                    }
                    let e = linalg::min_eig_hermitian_part(&acc);
                    if e < floor {
                        floor = e;
                        argmin = (angle(a), angle(b));
                    }
                }
            }
        }
        OuterRealization::Toeplitz => {
            for b in 0..grid {
                let e = x.min_eig_at(Complex64::ONE, circle(angle(b)));
                if e < floor {
                    floor = e;
                    argmin = (0.0, angle(b));
                }
            }
        }
    }
    let lipschitz = x.lipschitz();
    let certified_margin = floor - lipschitz * PI / grid as f64;
    Ok(MinPositivityCertificate {
        grid,
        floor,
        lipschitz,
        certified_margin,
        certified: certified_margin > 0.0,
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn constant_identity_is_certified() {
        let x = TwoLevelToeplitz::scalar(2, 2, OuterRealization::Function, |k, j| {
            if (k, j) == (0, 0) { c(1.0, 0.0) } else { c(0.0, 0.0) }
        });
        let cert = certify_two_level_min_positive(&x, 64).unwrap();
        assert!((cert.floor - 1.0).abs() < 1e-15);
        assert_eq!(cert.lipschitz, 0.0);
        assert!(cert.certified);
    }

    #[test]
    fn trace_zero_symbol_is_not_certified() {
        let x = TwoLevelToeplitz::scalar(2, 1, OuterRealization::Function, |k, _| {
            if k == 0 { c(0.0, 0.0) } else { c(1.0, 0.0) }
        });
        let cert = certify_two_level_min_positive(&x, 64).unwrap();
        assert!((cert.floor + 2.0).abs() < 1e-12);
        assert!(!cert.certified);
    }

    #[test]
    fn rejects_non_selfadjoint() {
        let x = TwoLevelToeplitz::scalar(2, 2, OuterRealization::Function, |k, j| c(k as f64, j as f64));
        assert!(matches!(
            certify_two_level_min_positive(&x, 16),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let x = TwoLevelToeplitz::from_fn(2, 3, 2, OuterRealization::Function, |k, j| {
            let a = CMat::from_fn(2, 2, |r, s| c((r + 2 * s) as f64 + k as f64, j as f64 - r as f64));
            let b = CMat::from_fn(2, 2, |r, s| c((s + 2 * r) as f64 - k as f64, r as f64 - j as f64));
            (a + b.adjoint()) * c(0.5, 0.0)
        });
        let x = x.add(&TwoLevelToeplitz::from_fn(2, 3, 2, OuterRealization::Function, |k, j| {
            x.coeff(-k, -j).adjoint()
        }))
        .unwrap()
        .scale(0.5);
        assert!(x.is_selfadjoint(1e-14));
        let cert = certify_two_level_min_positive(&x, 32).unwrap();
        let direct = (0..32)
            .flat_map(|a| (0..32).map(move |b| (a, b)))
            .map(|(a, b)| {
                x.min_eig_at(circle(TAU * a as f64 / 32.0), circle(TAU * b as f64 / 32.0))
            })
            .fold(f64::INFINITY, f64::min);
        assert!((cert.floor - direct).abs() < 1e-12);
    }
}

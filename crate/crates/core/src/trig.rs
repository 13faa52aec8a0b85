//! Laurent (trigonometric) polynomials on the unit circle, scalar and
//! matrix valued.

use std::f64::consts::PI;

use num_complex::Complex64;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::tolerance::UNIT_MODULUS_SLACK;

/// Validates `|z| = 1` within [`UNIT_MODULUS_SLACK`] and renormalizes.
pub fn unit_point(z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if !r.is_finite() || (r - 1.0).abs() > UNIT_MODULUS_SLACK {
        return Err(Error::NotUnitModulus(format!("{z}"), r));
    }
    Ok(z / r)
}

/// `e^{i theta}`.
#[inline]
pub fn circle(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// The `count`-point uniform grid `e^{2 pi i j / count}`.
pub fn circle_grid(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| circle(2.0 * PI * j as f64 / count as f64))
        .collect()
}

/// Integer power of a unit-modulus point (negative exponents conjugate).
#[inline]
pub(crate) fn unit_pow(z: Complex64, k: isize) -> Complex64 {
    if k >= 0 {
        z.powu(k as u32)
    } else {
        z.conj().powu((-k) as u32)
    }
}

/// `f(z) = sum_{|k| <= d} a_k z^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "crate::wire::TrigPolyJson", try_from = "crate::wire::TrigPolyJson")]
pub struct TrigPoly {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// Coefficients listed for `k = -d..=d`.
    pub fn new(degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * degree + 1 {
            return Err(Error::ShapeMismatch(format!(
                "degree bound {degree} needs {} coefficients, got {}",
                2 * degree + 1,
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![Complex64::ZERO; 2 * degree + 1],
        }
    }

    pub fn constant(a: f64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![c(a, 0.0)],
        }
    }

    /// The monomial `chi_k(z) = z^k`.
    pub fn chi(k: isize) -> Self {
        let mut p = Self::zeros(k.unsigned_abs());
        p.set_coeff(k, c(1.0, 0.0));
        p
    }

    pub fn from_fn(degree: usize, f: impl FnMut(isize) -> Complex64) -> Self {
        let d = degree as isize;
        Self {
            degree,
            coeffs: (-d..=d).map(f).collect(),
        }
    }

    pub fn degree_bound(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `a_k`, zero outside the stored range.
    pub fn coeff(&self, k: isize) -> Complex64 {
        if k.unsigned_abs() > self.degree {
            Complex64::ZERO
        } else {
            self.coeffs[(k + self.degree as isize) as usize]
        }
    }

    /// Panics if `|k|` exceeds the degree bound.
    pub fn set_coeff(&mut self, k: isize, value: Complex64) {
        assert!(k.unsigned_abs() <= self.degree, "offset {k} out of range");
        let idx = (k + self.degree as isize) as usize;
        self.coeffs[idx] = value;
    }

    /// Re-expresses the polynomial with a larger degree bound.
    pub fn with_degree_bound(&self, degree: usize) -> Result<Self> {
        let eff = self.effective_degree();
        if eff > degree {
            return Err(Error::DegreeMismatch {
                degree: eff,
                bound: degree,
            });
        }
        Ok(Self::from_fn(degree, |k| self.coeff(k)))
    }

    /// Largest `|k|` with a nonzero coefficient.
    pub fn effective_degree(&self) -> usize {
        let d = self.degree as isize;
        (0..=d)
            .rev()
            .find(|&k| self.coeff(k) != Complex64::ZERO || self.coeff(-k) != Complex64::ZERO)
            .unwrap_or(0) as usize
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        let d = self.degree as isize;
        (-d..=d).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
    }

    /// Evaluation at a point validated to lie on the unit circle.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_unchecked(unit_point(z)?))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let d = self.degree as isize;
        // analytic and coanalytic halves by Horner, z^{-1} = conj(z) on the circle
        let zi = z.conj();
        let mut pos = Complex64::ZERO;
        for k in (1..=d).rev() {
            pos = (pos + self.coeff(k)) * z;
        }
        let mut neg = Complex64::ZERO;
        for k in (1..=d).rev() {
            neg = (neg + self.coeff(-k)) * zi;
        }
        self.coeff(0) + pos + neg
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.degree, |k| self.coeff(-k).conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree.max(other.degree);
        Self::from_fn(d, |k| self.coeff(k) + other.coeff(k))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = self.degree.max(other.degree);
        Self::from_fn(d, |k| self.coeff(k) - other.coeff(k))
    }

    /// Pointwise product (coefficient convolution).
    pub fn mul(&self, other: &Self) -> Self {
        let d = self.degree + other.degree;
        let (a, b) = (self.degree as isize, other.degree as isize);
        let mut out = Self::zeros(d);
        for i in -a..=a {
            for j in -b..=b {
                let v = out.coeff(i + j) + self.coeff(i) * other.coeff(j);
                out.set_coeff(i + j, v);
            }
        }
        out
    }

    /// `|h|^2 = h* h` for this polynomial `h`.
    pub fn abs_squared(&self) -> Self {
        self.adjoint().mul(self)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sum_k |k| |a_k|`, a bound on `|d f / d theta|`.
    pub fn lipschitz(&self) -> f64 {
        let d = self.degree as isize;
        (-d..=d)
            .map(|k| k.unsigned_abs() as f64 * self.coeff(k).norm())
            .sum()
    }
}

/// `F(z) = sum_{|k| <= d} a_k z^k` with `m x m` matrix coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "crate::wire::BlockTrigPolyJson", try_from = "crate::wire::BlockTrigPolyJson")]
pub struct BlockTrigPoly {
    degree: usize,
    size: usize,
    coeffs: Vec<CMat>,
}

impl BlockTrigPoly {
    pub fn new(degree: usize, size: usize, coeffs: Vec<CMat>) -> Result<Self> {
        if coeffs.len() != 2 * degree + 1 {
            return Err(Error::ShapeMismatch(format!(
                "degree bound {degree} needs {} coefficients, got {}",
                2 * degree + 1,
                coeffs.len()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|a| a.shape() != (size, size)) {
            return Err(Error::ShapeMismatch(format!(
                "coefficient of shape {:?}, expected {size}x{size}",
                bad.shape()
            )));
        }
        Ok(Self {
            degree,
            size,
            coeffs,
        })
    }

    pub fn zeros(degree: usize, size: usize) -> Self {
        Self {
            degree,
            size,
            coeffs: vec![CMat::zeros(size, size); 2 * degree + 1],
        }
    }

    pub fn from_fn(degree: usize, size: usize, f: impl FnMut(isize) -> CMat) -> Self {
        let d = degree as isize;
        let coeffs: Vec<CMat> = (-d..=d).map(f).collect();
        debug_assert!(coeffs.iter().all(|a| a.shape() == (size, size)));
        Self {
            degree,
            size,
            coeffs,
        }
    }

    /// `p(z) * A` for a scalar polynomial `p` and constant matrix `A`.
    pub fn from_scalar(p: &TrigPoly, a: &CMat) -> Self {
        Self::from_fn(p.degree_bound(), a.nrows(), |k| a * p.coeff(k))
    }

    /// `H(z)* H(z)` for the analytic polynomial `H(z) = sum_{j=0}^{d} b_j z^j`.
    pub fn from_analytic_factor(b: &[CMat]) -> Result<Self> {
        let Some(first) = b.first() else {
            return Err(Error::Precondition("empty analytic factor".into()));
        };
        let (rows, size) = first.shape();
        if b.iter().any(|x| x.shape() != (rows, size)) {
            return Err(Error::ShapeMismatch("analytic factor blocks differ in shape".into()));
        }
        let d = b.len() - 1;
        Ok(Self::from_fn(d, size, |l| {
            let mut a = CMat::zeros(size, size);
            for (j, bj) in b.iter().enumerate() {
                let i = j as isize + l;
                if (0..=d as isize).contains(&i) {
                    a += bj.adjoint() * &b[i as usize];
                }
            }
            a
        }))
    }

    pub fn degree_bound(&self) -> usize {
        self.degree
    }

    pub fn block_size(&self) -> usize {
        self.size
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: isize) -> CMat {
        if k.unsigned_abs() > self.degree {
            CMat::zeros(self.size, self.size)
        } else {
            self.coeffs[(k + self.degree as isize) as usize].clone()
        }
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        let d = self.degree as isize;
        (-d..=d).all(|k| (self.coeff(-k) - self.coeff(k).adjoint()).norm() <= tol)
    }

    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        Ok(self.eval_unchecked(unit_point(z)?))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> CMat {
        let d = self.degree as isize;
        let mut out = CMat::zeros(self.size, self.size);
        for k in -d..=d {
            out += &self.coeffs[(k + d) as usize] * unit_pow(z, k);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            degree: self.degree,
            size: self.size,
            coeffs: self.coeffs.iter().map(|a| a * c(s, 0.0)).collect(),
        }
    }

    /// Largest Frobenius norm among the coefficients.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Evaluation dispatch for scalar and matrix symbols.
#[derive(Debug, Clone, PartialEq)]
pub enum CircleValue {
    Scalar(Complex64),
    Matrix(CMat),
}

pub enum Symbol<'a> {
    Scalar(&'a TrigPoly),
    Block(&'a BlockTrigPoly),
}

pub fn eval_on_circle(p: Symbol<'_>, z: Complex64) -> Result<CircleValue> {
    match p {
        Symbol::Scalar(f) => f.eval(z).map(CircleValue::Scalar),
        Symbol::Block(f) => f.eval(z).map(CircleValue::Matrix),
    }
}

/// Deterministic trial division.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The constant Fourier coefficient recovered from the average of `f` over
/// the `p`-th roots of unity, valid when `p` is prime and exceeds the
/// degree bound of `f`.
pub fn fourier_coeff_via_roots(f: &TrigPoly, p: u64) -> Result<Complex64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let m = f.degree_bound() as u64 + 1;
    if p < m {
        return Err(Error::PrimeTooSmall { p, m });
    }
    let zeta = circle(2.0 * PI / p as f64);
    let mut acc = Complex64::ZERO;
    for k in 1..=p {
        acc += f.eval_unchecked(zeta.powu(k as u32));
    }
    Ok(acc / p as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let i = c(0.0, 1.0);
        assert!((TrigPoly::chi(1).eval(i).unwrap() - i).norm() < 1e-15);

        let f = TrigPoly::constant(2.0)
            .add(&TrigPoly::chi(1))
            .add(&TrigPoly::chi(-1));
        assert!(f.eval(c(-1.0, 0.0)).unwrap().norm() < 1e-15);

        assert!(matches!(
            f.eval(c(1.1, 0.0)),
            Err(Error::NotUnitModulus(..))
        ));
        // slightly off the circle is renormalized
        assert!(f.eval(c(1.0 + 1e-10, 0.0)).is_ok());
    }

    #[test]
    fn block_eval_selfadjoint() {
        let a1 = CMat::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let a0 = CMat::from_fn(2, 2, |i, j| if i == j { c(3.0, 0.0) } else { c(0.0, 0.0) });
        let f = BlockTrigPoly::new(1, 2, vec![a1.adjoint(), a0, a1]).unwrap();
        assert!(f.is_selfadjoint(0.0));
        for z in circle_grid(16) {
            let v = f.eval(z).unwrap();
            assert!((&v - v.adjoint()).norm() < 1e-14);
        }
    }

    #[test]
    fn product_and_abs_squared() {
        // |1 + z|^2 = 2 + z + 1/z
        let h = TrigPoly::constant(1.0).add(&TrigPoly::chi(1));
        let f = h.abs_squared();
        assert_eq!(f.coeff(0), c(2.0, 0.0));
        assert_eq!(f.coeff(1), c(1.0, 0.0));
        assert_eq!(f.coeff(-1), c(1.0, 0.0));
        assert!(f.is_selfadjoint(0.0));
    }

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn fourier_examples() {
        let one = TrigPoly::chi(0);
        for p in [2, 3, 5, 7] {
            assert!((fourier_coeff_via_roots(&one, p).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        }
        let f = TrigPoly::constant(3.0).add(&TrigPoly::chi(1).scale(c(2.0, 0.0)));
        assert!((fourier_coeff_via_roots(&f, 5).unwrap() - c(3.0, 0.0)).norm() < 1e-14);

        let chi1 = TrigPoly::chi(1);
        assert!(fourier_coeff_via_roots(&chi1, 2).unwrap().norm() < 1e-15);

        assert!(matches!(fourier_coeff_via_roots(&chi1, 4), Err(Error::NotPrime(4))));
        let wide = TrigPoly::chi(4);
        assert!(matches!(
            fourier_coeff_via_roots(&wide, 3),
            Err(Error::PrimeTooSmall { .. })
        ));
    }
}

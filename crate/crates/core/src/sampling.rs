//! Seeded random instances. Every randomized procedure in the crate draws
//! from a [`ChaCha8Rng`] built by [`rng`], so a seed fully determines it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, c, CMat};
use crate::toeplitz::{BlockToeplitz, ToeplitzMat};
use crate::trig::{circle, BlockTrigPoly, TrigPoly};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (`E|z|^2 = 1`).
pub fn complex_normal(rng: &mut Rng64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn unit_point(rng: &mut Rng64) -> Complex64 {
    circle(rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn matrix(rng: &mut Rng64, rows: usize, cols: usize) -> CMat {
    let entries: Vec<Complex64> = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    DMatrix::from_vec(rows, cols, entries)
}

pub fn hermitian(rng: &mut Rng64, m: usize) -> CMat {
    let a = matrix(rng, m, m);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// `A A*` for a Gaussian `A`.
pub fn psd(rng: &mut Rng64, m: usize) -> CMat {
    let a = matrix(rng, m, m);
    &a * a.adjoint()
}

pub fn trig_poly(rng: &mut Rng64, degree: usize) -> TrigPoly {
    TrigPoly::from_fn(degree, |_| complex_normal(rng))
}

pub fn selfadjoint_trig_poly(rng: &mut Rng64, degree: usize) -> TrigPoly {
    let p = trig_poly(rng, degree);
    p.add(&p.adjoint()).scale(c(0.5, 0.0))
}

/// Analytic polynomial `h(z) = sum_{k=0}^{d} b_k z^k` stored as a TrigPoly.
pub fn analytic_trig_poly(rng: &mut Rng64, degree: usize) -> TrigPoly {
    TrigPoly::from_fn(degree, |k| if k >= 0 { complex_normal(rng) } else { Complex64::ZERO })
}

/// `|h|^2` for a random analytic `h` of the given degree.
pub fn nonneg_trig_poly(rng: &mut Rng64, degree: usize) -> TrigPoly {
    let h = analytic_trig_poly(rng, degree);
    h.abs_squared().with_degree_bound(degree).expect("degree of |h|^2")
}

/// Coefficients `b_0..b_d` of a random analytic matrix polynomial.
pub fn analytic_factor(rng: &mut Rng64, m: usize, degree: usize) -> Vec<CMat> {
    (0..=degree).map(|_| matrix(rng, m, m)).collect()
}

/// `H* H` for a random analytic `H`.
pub fn psd_block_trig_poly(rng: &mut Rng64, m: usize, degree: usize) -> BlockTrigPoly {
    BlockTrigPoly::from_analytic_factor(&analytic_factor(rng, m, degree)).expect("valid factor")
}

pub fn toeplitz(rng: &mut Rng64, n: usize) -> ToeplitzMat {
    ToeplitzMat::from_fn(n, |_| complex_normal(rng))
}

pub fn hermitian_toeplitz(rng: &mut Rng64, n: usize) -> ToeplitzMat {
    let t = toeplitz(rng, n);
    t.add(&t.adjoint()).expect("same order").scale(c(0.5, 0.0))
}

/// Hermitian Toeplitz matrix shifted so that its smallest eigenvalue is
/// exactly `floor` (up to roundoff).
pub fn toeplitz_with_floor(rng: &mut Rng64, n: usize, floor: f64) -> ToeplitzMat {
    let t = hermitian_toeplitz(rng, n);
    let lo = linalg::min_eig_hermitian_part(&t.matrix());
    t.add(&ToeplitzMat::identity(n).scale(c(floor - lo, 0.0)))
        .expect("same order")
}

pub fn hermitian_block_toeplitz(rng: &mut Rng64, n: usize, m: usize) -> BlockToeplitz {
    let half = BlockToeplitz::from_fn(n, m, |_| matrix(rng, m, m));
    BlockToeplitz::from_fn(n, m, |k| {
        (half.symbol(k) + half.symbol(-k).adjoint()) * c(0.5, 0.0)
    })
}

/// Hermitian block Toeplitz matrix with smallest eigenvalue `floor`.
pub fn block_toeplitz_with_floor(rng: &mut Rng64, n: usize, m: usize, floor: f64) -> BlockToeplitz {
    let t = hermitian_block_toeplitz(rng, n, m);
    let lo = linalg::min_eig_hermitian_part(&t.matrix());
    t.add(&BlockToeplitz::identity(n, m).scale(floor - lo))
        .expect("same shape")
}

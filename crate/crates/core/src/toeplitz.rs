//! Scalar and block Toeplitz matrices stored by their generating symbols.
//!
//! Entry (row `k`, column `l`) of a Toeplitz matrix is the symbol
//! `tau_{k-l}`; every dense realization goes through [`layout`].

use num_complex::Complex64;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::tolerance::Tolerance;
use crate::trig::{unit_pow, unit_point};

/// Dense `n*m x n*m` matrix whose `(k, l)` block has entries
/// `entry(k - l, i, j)`. The single place where the Toeplitz orientation
/// is fixed.
fn layout(n: usize, m: usize, entry: impl Fn(isize, usize, usize) -> Complex64) -> CMat {
    CMat::from_fn(n * m, n * m, |r, s| {
        let (k, i) = (r / m, r % m);
        let (l, j) = (s / m, s % m);
        entry(k as isize - l as isize, i, j)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "crate::wire::ToeplitzJson", try_from = "crate::wire::ToeplitzJson")]
pub struct ToeplitzMat {
    order: usize,
    symbols: Vec<Complex64>,
}

impl ToeplitzMat {
    /// Symbols listed for `k = -n+1..=n-1`.
    pub fn new(order: usize, symbols: Vec<Complex64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder("Toeplitz order must be positive".into()));
        }
        if symbols.len() != 2 * order - 1 {
            return Err(Error::ShapeMismatch(format!(
                "order {order} needs {} symbols, got {}",
                2 * order - 1,
                symbols.len()
            )));
        }
        Ok(Self { order, symbols })
    }

    pub fn from_fn(order: usize, f: impl FnMut(isize) -> Complex64) -> Self {
        assert!(order > 0);
        let b = order as isize - 1;
        Self {
            order,
            symbols: (-b..=b).map(f).collect(),
        }
    }

    pub fn zeros(order: usize) -> Self {
        Self::from_fn(order, |_| Complex64::ZERO)
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |k| if k == 0 { c(1.0, 0.0) } else { Complex64::ZERO })
    }

    /// Reads the symbols off a dense matrix, rejecting non-Toeplitz input.
    pub fn from_matrix(m: &CMat, tol: f64) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::ShapeMismatch(format!("{:?} is not square", m.shape())));
        }
        let n = m.nrows();
        let t = Self::from_fn(n, |k| {
            if k >= 0 {
                m[(k as usize, 0)]
            } else {
                m[(0, (-k) as usize)]
            }
        });
        if (t.matrix() - m).norm() > tol {
            return Err(Error::Malformed("matrix is not Toeplitz".into()));
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    /// `tau_k`, zero for `|k| >= n`.
    pub fn symbol(&self, k: isize) -> Complex64 {
        if k.unsigned_abs() >= self.order {
            Complex64::ZERO
        } else {
            self.symbols[(k + self.order as isize - 1) as usize]
        }
    }

    pub fn matrix(&self) -> CMat {
        layout(self.order, 1, |k, _, _| self.symbol(k))
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        let b = self.order as isize - 1;
        (-b..=b).all(|k| (self.symbol(-k) - self.symbol(k).conj()).norm() <= tol)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.order, |k| self.symbol(-k).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.order, |k| self.symbol(-k))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(self.order, |k| self.symbol(k) * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::ShapeMismatch(format!(
                "orders {} and {}",
                self.order, other.order
            )));
        }
        Ok(Self::from_fn(self.order, |k| self.symbol(k) + other.symbol(k)))
    }

    pub fn is_psd(&self, tol: &Tolerance) -> Result<linalg::PsdReport> {
        linalg::is_psd(&self.matrix(), tol)
    }

    /// Whether some off-diagonal symbol exceeds `tol` in modulus.
    pub fn is_nondiagonal(&self, tol: f64) -> bool {
        (1..self.order as isize).any(|k| self.symbol(k).norm() > tol || self.symbol(-k).norm() > tol)
    }
}

/// `n x n` block Toeplitz matrix with `m x m` symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "crate::wire::BlockToeplitzJson", try_from = "crate::wire::BlockToeplitzJson")]
pub struct BlockToeplitz {
    order: usize,
    block: usize,
    symbols: Vec<CMat>,
}

impl BlockToeplitz {
    pub fn new(order: usize, block: usize, symbols: Vec<CMat>) -> Result<Self> {
        if order == 0 || block == 0 {
            return Err(Error::InvalidOrder(format!(
                "order {order} and block size {block} must be positive"
            )));
        }
        if symbols.len() != 2 * order - 1 {
            return Err(Error::ShapeMismatch(format!(
                "order {order} needs {} symbols, got {}",
                2 * order - 1,
                symbols.len()
            )));
        }
        if let Some(bad) = symbols.iter().find(|s| s.shape() != (block, block)) {
            return Err(Error::ShapeMismatch(format!(
                "symbol of shape {:?}, expected {block}x{block}",
                bad.shape()
            )));
        }
        Ok(Self {
            order,
            block,
            symbols,
        })
    }

    pub fn from_fn(order: usize, block: usize, f: impl FnMut(isize) -> CMat) -> Self {
        assert!(order > 0 && block > 0);
        let b = order as isize - 1;
        let symbols: Vec<CMat> = (-b..=b).map(f).collect();
        assert!(symbols.iter().all(|s| s.shape() == (block, block)));
        Self {
            order,
            block,
            symbols,
        }
    }

    pub fn identity(order: usize, block: usize) -> Self {
        Self::from_fn(order, block, |k| {
            if k == 0 {
                CMat::identity(block, block)
            } else {
                CMat::zeros(block, block)
            }
        })
    }

    /// `t (x) g` with `t` scalar Toeplitz: symbols `tau_k g`.
    pub fn kron(t: &ToeplitzMat, g: &CMat) -> Self {
        Self::from_fn(t.order(), g.nrows(), |k| g * t.symbol(k))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn symbols(&self) -> &[CMat] {
        &self.symbols
    }

    pub fn symbol(&self, k: isize) -> CMat {
        self.symbol_ref(k)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.block, self.block))
    }

    pub(crate) fn symbol_ref(&self, k: isize) -> Option<&CMat> {
        (k.unsigned_abs() < self.order).then(|| &self.symbols[(k + self.order as isize - 1) as usize])
    }

    pub fn matrix(&self) -> CMat {
        layout(self.order, self.block, |k, i, j| {
            self.symbol_ref(k).map_or(Complex64::ZERO, |s| s[(i, j)])
        })
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        let b = self.order as isize - 1;
        (-b..=b).all(|k| (self.symbol(-k) - self.symbol(k).adjoint()).norm() <= tol)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.order, self.block) != (other.order, other.block) {
            return Err(Error::ShapeMismatch("block Toeplitz shapes differ".into()));
        }
        Ok(Self::from_fn(self.order, self.block, |k| {
            self.symbol(k) + other.symbol(k)
        }))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(self.order, self.block, |k| self.symbol(k) * c(s, 0.0))
    }

    /// Frobenius norm of the dense realization.
    pub fn frobenius(&self) -> f64 {
        let b = self.order as isize - 1;
        (-b..=b)
            .map(|k| (self.order - k.unsigned_abs()) as f64 * self.symbol(k).norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// The scalar Toeplitz matrix when `m = 1`.
    pub fn to_scalar(&self) -> Option<ToeplitzMat> {
        (self.block == 1).then(|| ToeplitzMat::from_fn(self.order, |k| self.symbol(k)[(0, 0)]))
    }
}

impl From<&ToeplitzMat> for BlockToeplitz {
    fn from(t: &ToeplitzMat) -> Self {
        Self::from_fn(t.order(), 1, |k| CMat::from_element(1, 1, t.symbol(k)))
    }
}

/// The canonical basis element `r_k`: `s^k` for `k >= 0`, `(s*)^{|k|}` otherwise,
/// with `s` the lower shift.
pub fn basis_r(order: usize, k: isize) -> Result<ToeplitzMat> {
    if order == 0 {
        return Err(Error::InvalidOrder("order must be positive".into()));
    }
    if k.unsigned_abs() >= order {
        return Err(Error::OffsetOutOfRange {
            offset: k,
            bound: order - 1,
        });
    }
    Ok(ToeplitzMat::from_fn(order, |j| {
        if j == k {
            c(1.0, 0.0)
        } else {
            Complex64::ZERO
        }
    }))
}

/// The lower shift `s = r_1`.
pub fn shift(order: usize) -> Result<ToeplitzMat> {
    basis_r(order, 1)
}

/// The unitaries `u = e_{1,n} + sum e_{i,i-1}` and `w = -e_{1,n} + sum e_{i,i-1}`
/// with `s = (u + w) / 2`. The corner entry is the whole `-(n-1)` diagonal,
/// so both are Toeplitz.
pub fn shift_unitaries(order: usize) -> Result<(ToeplitzMat, ToeplitzMat)> {
    if order < 2 {
        return Err(Error::InvalidOrder(format!(
            "shift unitaries need order >= 2, got {order}"
        )));
    }
    let corner = -(order as isize - 1);
    let with_corner = |sign: f64| {
        ToeplitzMat::from_fn(order, |k| match k {
            1 => c(1.0, 0.0),
            k if k == corner => c(sign, 0.0),
            _ => Complex64::ZERO,
        })
    };
    Ok((with_corner(1.0), with_corner(-1.0)))
}

/// The rank-one positive Toeplitz matrix `Lambda(lambda) = c* c` with
/// `c = (1, lambda, ..., lambda^{n-1})`; its symbols are `tau_j = lambda^{-j}`.
pub fn pure_atom(order: usize, lambda: Complex64) -> Result<ToeplitzMat> {
    if order == 0 {
        return Err(Error::InvalidOrder("order must be positive".into()));
    }
    let lambda = unit_point(lambda)?;
    Ok(ToeplitzMat::from_fn(order, |j| unit_pow(lambda, -j)))
}

/// The anti-diagonal permutation `u = sum e_{i, n-i+1}` and the residual
/// `||x^t - u* x u||_F`, which vanishes for every Toeplitz `x`.
pub fn transpose_similarity(x: &ToeplitzMat) -> (CMat, f64) {
    let n = x.order();
    let u = CMat::from_fn(n, n, |i, j| {
        if i + j == n - 1 {
            c(1.0, 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let m = x.matrix();
    let residual = (m.transpose() - u.adjoint() * &m * &u).norm();
    (u, residual)
}

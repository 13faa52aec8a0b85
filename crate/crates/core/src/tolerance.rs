use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical slack used by positivity checks and reassembly residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Eigenvalues above `-eig_tol` count as nonnegative.
    pub eig_tol: f64,
    /// Bound on reassembly / convolution residuals.
    pub residual_tol: f64,
}

impl Tolerance {
    pub const DEFAULT_EIG: f64 = 1e-10;
    pub const DEFAULT_RESIDUAL: f64 = 1e-8;

    pub fn new(eig_tol: f64, residual_tol: f64) -> Result<Self> {
        if eig_tol.is_nan() || residual_tol.is_nan() || eig_tol < 0.0 || residual_tol < 0.0 {
            return Err(Error::Precondition(format!(
                "tolerances must be nonnegative (eig_tol = {eig_tol}, residual_tol = {residual_tol})"
            )));
        }
        Ok(Self {
            eig_tol,
            residual_tol,
        })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eig_tol: Self::DEFAULT_EIG,
            residual_tol: Self::DEFAULT_RESIDUAL,
        }
    }
}

/// Accepted distance of a user-supplied point from the unit circle.
pub const UNIT_MODULUS_SLACK: f64 = 1e-9;

/// Relative selfadjointness slack: `||M - M*|| <= SELFADJOINT_SLACK * ||M||`.
pub const SELFADJOINT_SLACK: f64 = 1e-8;

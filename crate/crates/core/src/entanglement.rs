//! The maximally entangled Toeplitz matrix `xi_n`: construction, its
//! entanglement certificate, refutation of claimed separable
//! decompositions, purity of `xi_n` in the min-positive cone, and the Choi
//! map as a Schur multiplier on Toeplitz matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::block_cones::{OuterRealization, TwoLevelToeplitz};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, PsdReport};
use crate::sampling::{self, Rng64};
use crate::toeplitz::ToeplitzMat;
use crate::tolerance::Tolerance;
use crate::trig::{circle_grid, TrigPoly};

/// `xi_n = sum_{|k| < n} r_k (x) chi_{-k}`; as a function of `z` it is the
/// rank-one matrix with entries `xi_n(z)[k][l] = z^{l-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiMatrix {
    order: usize,
    symbol: TwoLevelToeplitz,
}

pub fn build_xi(order: usize) -> Result<XiMatrix> {
    if order == 0 {
        return Err(Error::InvalidOrder("xi needs order n >= 1".into()));
    }
    let symbol = TwoLevelToeplitz::scalar(order, order, OuterRealization::Toeplitz, |k, j| {
        if j == -k { c(1.0, 0.0) } else { c(0.0, 0.0) }
    });
    Ok(XiMatrix { order, symbol })
}

impl XiMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn as_two_level(&self) -> &TwoLevelToeplitz {
        &self.symbol
    }

    /// `xi_n(z)`, an `n x n` matrix.
    pub fn value(&self, z: Complex64) -> CMat {
        self.symbol.value(Complex64::ONE, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparabilityVerdict {
    Entangled,
    Separable,
}

/// An off-diagonal entry of `xi_n(z)` that does not vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffDiagonalWitness {
    pub row: usize,
    pub col: usize,
    pub z: Complex64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementCertificate {
    pub order: usize,
    pub samples: usize,
    /// Largest second eigenvalue of `xi_n(z)` over the samples.
    pub rank_profile: f64,
    pub off_diagonal_witness: Option<OffDiagonalWitness>,
    pub verdict: SeparabilityVerdict,
    pub basis: String,
}

const RANK_ONE_BASIS: &str = "xi_n(z) is positive of rank one for every z and has a \
nondiagonal Toeplitz coefficient, so every separable decomposition would have to vanish";

/// Checks the two hypotheses that force entanglement: `xi_n(z)` is PSD of
/// rank one at every sample, and it has a nonzero off-diagonal entry.
pub fn certify_entangled(x: &XiMatrix, samples: usize, tol: f64) -> Result<EntanglementCertificate> {
    let n = x.order();
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is needed".into()));
    }
    if n == 1 {
        return Ok(EntanglementCertificate {
            order: 1,
            samples,
            rank_profile: 0.0,
            off_diagonal_witness: None,
            verdict: SeparabilityVerdict::Separable,
            basis: "xi_1 is the constant 1, which is separable".into(),
        });
    }
    let mut rank_profile = 0.0f64;
    let mut witness: Option<OffDiagonalWitness> = None;
    for (i, z) in circle_grid(samples).into_iter().enumerate() {
        let v = x.value(z);
        let (values, _) = linalg::eigh(&v)?;
        if values[0] < -tol * n as f64 || (values[n - 1] - n as f64).abs() > tol * n as f64 {
            return Err(Error::Precondition(format!(
                "xi_{n} at sample {i} has spectrum [{:e}, {:e}], not a rank-one projection of trace n",
                values[0],
                values[n - 1]
            )));
        }
        rank_profile = rank_profile.max(values[n - 2]);
        let magnitude = v[(0, 1)].norm();
        if witness.is_none_or(|w| magnitude > w.magnitude) {
            witness = Some(OffDiagonalWitness {
                row: 0,
                col: 1,
                z,
                magnitude,
            });
        }
    }
    if rank_profile >= tol * n as f64 {
        return Err(Error::Precondition(format!(
            "second eigenvalue {rank_profile:e} of xi_{n} is not negligible"
        )));
    }
    if witness.is_none_or(|w| w.magnitude <= tol) {
        return Err(Error::Precondition(format!("xi_{n} looks diagonal")));
    }
    Ok(EntanglementCertificate {
        order: n,
        samples,
        rank_profile,
        off_diagonal_witness: witness,
        verdict: SeparabilityVerdict::Entangled,
        basis: RANK_ONE_BASIS.into(),
    })
}

/// Which argument refuted a claimed decomposition `xi_n = sum_j t_j (x) f_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Refutation {
    /// `sum_j f_j(z) t_j` differs from `xi_n(z)` in operator norm.
    Mismatch { z: Complex64, deviation: f64 },
    /// `t_j` is nondiagonal, so `f_j(z) t_j` proportional to `xi_n(z)` forces
    /// `tau_0 fhat_j(k + l) = tau_l fhat_j(k)` for all `k`, which only the zero
    /// polynomial satisfies; yet `||f_j|| > tol`.
    FourierContradiction {
        index: usize,
        offset: isize,
        f_norm: f64,
        /// `max_k |tau_0 fhat_j(k + l) - tau_l fhat_j(k)|`.
        relation_defect: f64,
    },
    NotRefuted,
}

/// Tries to refute `xi_n = sum_j t_j (x) f_j` with PSD Toeplitz `t_j` and
/// nonnegative `f_j`.
pub fn refute_decomposition(
    x: &XiMatrix,
    claimed: &[(ToeplitzMat, TrigPoly)],
    tol: &Tolerance,
    slack: f64,
) -> Result<Refutation> {
    let n = x.order();
    let mut degree = 0;
    for (j, (t, f)) in claimed.iter().enumerate() {
        if t.order() != n {
            return Err(Error::Malformed(format!(
                "term {j} has order {}, expected {n}",
                t.order()
            )));
        }
        let rep = t.is_psd(tol)?;
        if !rep.psd {
            return Err(Error::NotPsd {
                min_eig: rep.min_eig,
            });
        }
        if !f.is_selfadjoint(1e-12 * (1.0 + f.norm())) {
            return Err(Error::Malformed(format!("f_{j} is not real-valued")));
        }
        degree = degree.max(f.degree_bound());
    }
    let points = (8 * (degree + n)).max(64);
    let grid = circle_grid(points);
    for (_, f) in claimed {
        let min = grid
            .iter()
            .map(|&z| f.eval_unchecked(z).re)
            .fold(f64::INFINITY, f64::min);
        if min < -tol.eig_tol * (1.0 + f.norm()) {
            return Err(Error::NotPositive { min });
        }
    }
    let mut worst = (Complex64::ONE, -1.0);
    for &z in &grid {
        let mut sum = x.value(z);
        for (t, f) in claimed {
            sum -= t.matrix() * f.eval_unchecked(z);
        }
        let dev = linalg::op_norm(&sum);
        if dev > worst.1 {
            worst = (z, dev);
        }
    }
    if worst.1 > slack {
        return Ok(Refutation::Mismatch {
            z: worst.0,
            deviation: worst.1,
        });
    }
    for (index, (t, f)) in claimed.iter().enumerate() {
        let f_norm = f.norm();
        if f_norm <= slack {
            continue;
        }
        let offset = (1..n as isize).max_by(|&a, &b| t.symbol(a).norm().total_cmp(&t.symbol(b).norm()));
        let Some(offset) = offset else { continue };
        let tau_l = t.symbol(offset);
        if tau_l.norm() <= slack {
            continue;
        }
        let tau_0 = t.symbol(0);
        let d = f.degree_bound() as isize;
        let relation_defect = (-d - offset..=d)
            .map(|k| (tau_0 * f.coeff(k + offset) - tau_l * f.coeff(k)).norm())
            .fold(0.0, f64::max);
        return Ok(Refutation::FourierContradiction {
            index,
            offset,
            f_norm,
            relation_defect,
        });
    }
    Ok(Refutation::NotRefuted)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PurityVerdict {
    /// `f = lambda xi_n`.
    Proportional { lambda: f64, deviation: f64, residual: f64 },
    /// A split that is not proportional; never expected for valid input.
    ProportionalityViolated { deviation: f64, residual: f64 },
}

impl PurityVerdict {
    /// `max(max_z |alpha(z) - lambda|, ||f - lambda xi_n||)`.
    pub fn discrepancy(&self) -> f64 {
        match *self {
            Self::Proportional {
                deviation, residual, ..
            }
            | Self::ProportionalityViolated { deviation, residual } => deviation.max(residual),
        }
    }
}

fn purity_grid(n: usize) -> usize {
    (16 * n).max(64)
}

fn grid_floor(x: &TwoLevelToeplitz, points: usize) -> f64 {
    circle_grid(points)
        .into_iter()
        .map(|w| x.min_eig_at(Complex64::ONE, w))
        .fold(f64::INFINITY, f64::min)
}

/// Given `xi_n = f + g` with both summands min-positive, returns the
/// proportionality constant `lambda` with `f = lambda xi_n`.
pub fn purity_split_check(
    f: &TwoLevelToeplitz,
    g: &TwoLevelToeplitz,
    n: usize,
    tol: f64,
) -> Result<PurityVerdict> {
    let xi = build_xi(n)?;
    let xs = xi.as_two_level();
    f.same_shape(xs)?;
    g.same_shape(xs)?;
    let gap = f.add(g)?.add(&xs.scale(-1.0))?.coeff_norm();
    if gap > tol {
        return Err(Error::Precondition(format!(
            "summands differ from xi_{n} by {gap:e}"
        )));
    }
    let points = purity_grid(n);
    for s in [f, g] {
        let floor = grid_floor(s, points);
        if floor < -tol {
            return Err(Error::NotPsd { min_eig: floor });
        }
    }
    let alphas: Vec<f64> = circle_grid(points)
        .into_iter()
        .map(|w| linalg::op_norm(&f.value(Complex64::ONE, w)) / n as f64)
        .collect();
    let lambda = alphas.iter().sum::<f64>() / alphas.len() as f64;
    let deviation = alphas
        .iter()
        .map(|a| (a - lambda).abs())
        .fold(0.0, f64::max);
    let residual = f.add(&xs.scale(-lambda))?.coeff_norm();
    Ok(if deviation < tol && residual < tol {
        PurityVerdict::Proportional {
            lambda,
            deviation,
            residual,
        }
    } else {
        PurityVerdict::ProportionalityViolated { deviation, residual }
    })
}

/// Random selfadjoint direction supported on the coefficients `c_{k,-k}`,
/// unit Frobenius norm.
pub fn random_xi_direction(n: usize, rng: &mut Rng64) -> TwoLevelToeplitz {
    let half: Vec<Complex64> = (0..n).map(|_| sampling::complex_normal(rng)).collect();
    let eta = TwoLevelToeplitz::scalar(n, n, OuterRealization::Toeplitz, |k, j| {
        if j != -k {
            c(0.0, 0.0)
        } else if k >= 0 {
            if k == 0 { c(half[0].re, 0.0) } else { half[k as usize] }
        } else {
            half[(-k) as usize].conj()
        }
    });
    let norm = eta.coeff_norm();
    eta.scale(1.0 / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuritySearchReport {
    pub order: usize,
    pub directions: usize,
    /// Largest `s` found with `xi_n / 2 +- s eta` both min-positive.
    pub max_feasible_step: f64,
    /// Largest proportionality discrepancy over all directions.
    pub worst_discrepancy: f64,
    pub violations: usize,
}

/// For random directions `eta`, finds by bisection the largest `s` keeping
/// `xi_n / 2 +- s eta` min-positive on the grid (eigenvalues above
/// `-psd_slack`), then checks with tolerance `tol` that the split is still
/// proportional to `xi_n`.
pub fn purity_search(
    n: usize,
    directions: usize,
    rng: &mut Rng64,
    psd_slack: f64,
    tol: f64,
) -> Result<PuritySearchReport> {
    let xi = build_xi(n)?;
    let half = xi.as_two_level().scale(0.5);
    let points = (8 * n).max(32);
    let feasible = |eta: &TwoLevelToeplitz, s: f64| -> Result<bool> {
        let plus = half.add(&eta.scale(s))?;
        let minus = half.add(&eta.scale(-s))?;
        Ok(grid_floor(&plus, points) >= -psd_slack && grid_floor(&minus, points) >= -psd_slack)
    };
    let mut report = PuritySearchReport {
        order: n,
        directions,
        max_feasible_step: 0.0,
        worst_discrepancy: 0.0,
        violations: 0,
    };
    for _ in 0..directions {
        let eta = random_xi_direction(n, rng);
        let (mut lo, mut hi) = (0.0, 1.0);
        if feasible(&eta, hi)? {
            lo = hi;
        } else {
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible(&eta, mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-3 * psd_slack {
                    break;
                }
            }
        }
        report.max_feasible_step = report.max_feasible_step.max(lo);
        let f = half.add(&eta.scale(lo))?;
        let g = half.add(&eta.scale(-lo))?;
        let verdict = purity_split_check(&f, &g, n, tol)?;
        if matches!(verdict, PurityVerdict::ProportionalityViolated { .. }) {
            report.violations += 1;
        }
        report.worst_discrepancy = report.worst_discrepancy.max(verdict.discrepancy());
    }
    Ok(report)
}

/// `psi(x)`: diagonal `(x11 + x33, x22 + x11, x33 + x22)`, off-diagonal negated.
pub fn choi_map(x: &CMat) -> Result<CMat> {
    if x.shape() != (3, 3) {
        return Err(Error::ShapeMismatch(format!(
            "the Choi map acts on 3x3 matrices, got {:?}",
            x.shape()
        )));
    }
    Ok(CMat::from_fn(3, 3, |i, j| {
        if i == j {
            x[(i, i)] + x[((i + 2) % 3, (i + 2) % 3)]
        } else {
            -x[(i, j)]
        }
    }))
}

/// The Schur multiplier `g` that realizes the Choi map on Toeplitz matrices.
pub fn choi_multiplier() -> CMat {
    linalg::real_matrix(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiReport {
    pub psi: Vec<Vec<Complex64>>,
    pub multiplier: Vec<Vec<f64>>,
    /// `||psi(x) - x o g||_F`.
    pub agreement: f64,
    pub multiplier_eigenvalues: Vec<f64>,
    /// `min_i (g_ii - sum_{j != i} |g_ij|)`.
    pub gershgorin_floor: f64,
    /// PSD test of `psi(x)`, for selfadjoint `x`.
    pub psi_psd: Option<PsdReport>,
    pub basis: String,
}

fn rows<T>(m: &CMat, f: impl Fn(Complex64) -> T) -> Vec<Vec<T>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| f(m[(i, j)])).collect())
        .collect()
}

/// Applies the Choi map to a `3 x 3` Toeplitz matrix and checks that it acts
/// as the Schur product with the PSD matrix `g`.
pub fn choi_map_demo(x: &ToeplitzMat, tol: &Tolerance) -> Result<ChoiReport> {
    if x.order() != 3 {
        return Err(Error::InvalidOrder(format!(
            "the Choi map demo needs order 3, got {}",
            x.order()
        )));
    }
    let m = x.matrix();
    let psi = choi_map(&m)?;
    let g = choi_multiplier();
    let agreement = (&psi - linalg::schur_product(&m, &g)?).norm();
    let multiplier_eigenvalues = linalg::eigvalsh(&g)?;
    let gershgorin_floor = (0..3)
        .map(|i| g[(i, i)].re - (0..3).filter(|&j| j != i).map(|j| g[(i, j)].norm()).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let psi_psd = if x.is_selfadjoint(1e-12 * (1.0 + m.norm())) {
        Some(linalg::is_psd(&psi, tol)?)
    } else {
        None
    };
    Ok(ChoiReport {
        psi: rows(&psi, |z| z),
        multiplier: rows(&g, |z| z.re),
        agreement,
        multiplier_eigenvalues,
        gershgorin_floor,
        psi_psd,
        basis: "on Toeplitz matrices the Choi map is the Schur product with a PSD matrix, \
hence completely positive there"
            .into(),
    })
}

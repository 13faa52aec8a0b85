use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::duality::{Atom, AtomicMeasure};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::toeplitz::BlockToeplitz;
use crate::tolerance::Tolerance;
use crate::trig::circle;

use super::min_psd_block;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparableOptions {
    pub epsilon: f64,
    /// Grid size `N`; defaults to `max(2n - 1, 8n)`.
    pub grid: Option<usize>,
    /// Stop once the relative reassembly residual falls below this.
    pub tol: f64,
    /// Iterations per grid before the grid is doubled.
    pub max_iter: usize,
    pub record_trace: bool,
}

impl Default for SeparableOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            grid: None,
            tol: 1e-8,
            max_iter: 20_000,
            record_trace: false,
        }
    }
}

/// One Dykstra iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DykstraStep {
    /// Moment residual of the affine iterate (zero up to roundoff).
    pub affine_residual: f64,
    /// `max_j max(0, -lambda_min)` over the affine iterate.
    pub psd_violation: f64,
    /// Relative reassembly residual of the PSD iterate.
    pub residual: f64,
}

/// `T + eps I = sum_j Lambda(lambda_j) (x) g_j` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    pub atoms: AtomicMeasure,
    pub epsilon: f64,
    /// `||sum_j Lambda(lambda_j) (x) g_j - (T + eps I)||_F / (1 + ||T||_F)`.
    pub residual: f64,
    pub grid: usize,
    pub iterations: usize,
    pub trace: Vec<DykstraStep>,
}

struct Grid {
    size: usize,
    order: usize,
    /// `lambda_j^k` for `k = 0..n-1`, row-major by `j`.
    powers: Vec<Complex64>,
}

impl Grid {
    fn new(size: usize, order: usize) -> Self {
        let mut powers = Vec::with_capacity(size * order);
        for j in 0..size {
            let lambda = circle(TAU * j as f64 / size as f64);
            let mut p = Complex64::ONE;
            for _ in 0..order {
                powers.push(p);
                p *= lambda;
            }
        }
        Self { size, order, powers }
    }

    fn pow(&self, j: usize, k: usize) -> Complex64 {
        self.powers[j * self.order + k]
    }

    /// `r_k = target_k - sum_j lambda_j^{-k} g_j` for `k = 0..n-1`.
    fn moment_residual(&self, g: &[CMat], target: &[CMat]) -> Vec<CMat> {
        target
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let mut r = t.clone();
                for (j, gj) in g.iter().enumerate() {
                    let p = self.pow(j, k).conj();
                    r.zip_apply(gj, |s, v| *s -= v * p);
                }
                r
            })
            .collect()
    }

    /// Orthogonal projection onto the moment constraints:
    /// `g_j += (1/N) sum_{|k| < n} lambda_j^k r_k`.
    fn project_affine(&self, g: &mut [CMat], target: &[CMat]) {
        let r = self.moment_residual(g, target);
        let inv = 1.0 / self.size as f64;
        for (j, gj) in g.iter_mut().enumerate() {
            *gj += &r[0] * Complex64::new(inv, 0.0);
            for (k, rk) in r.iter().enumerate().skip(1) {
                let p = self.pow(j, k) * inv;
                let term = rk * p;
                *gj += &term + term.adjoint();
            }
        }
    }
}

/// `sqrt(sum_k (n - |k|) ||r_k||^2)`, the Frobenius norm of the dense error.
fn dense_error(r: &[CMat]) -> f64 {
    let n = r.len();
    r.iter()
        .enumerate()
        .map(|(k, rk)| {
            let mult = if k == 0 { n as f64 } else { 2.0 * (n - k) as f64 };
            mult * rk.norm_squared()
        })
        .sum::<f64>()
        .sqrt()
}

/// Decomposes `T + eps I` into grid atoms `Lambda(lambda_j) (x) g_j` with PSD
/// `g_j`, by Dykstra's alternating projections between the product PSD cone
/// and the affine set of matching moments. The grid is doubled on stall, up
/// to `16 (2n - 1)` points.
pub fn separable_decompose(
    t: &BlockToeplitz,
    opts: &SeparableOptions,
    tol: &Tolerance,
) -> Result<SeparableDecomposition> {
    let (n, m) = (t.order(), t.block_size());
    if opts.epsilon.is_nan() || opts.epsilon <= 0.0 {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let report = min_psd_block(t, tol)?;
    if !report.psd {
        return Err(Error::NotPsd {
            min_eig: report.min_eig,
        });
    }
    let minimal = 2 * n - 1;
    let max_grid = 16 * minimal;
    let mut size = opts.grid.unwrap_or(minimal.max(8 * n));
    if size < minimal {
        return Err(Error::Precondition(format!(
            "grid of {size} points is below the minimum {minimal}"
        )));
    }
    let target: Vec<CMat> = (0..n as isize)
        .map(|k| {
            let mut s = t.symbol(k);
            if k == 0 {
                s += CMat::identity(m, m) * Complex64::new(opts.epsilon, 0.0);
            }
            s
        })
        .collect();
    let norm = 1.0 + t.frobenius();
    let mut best = f64::INFINITY;
    let mut total = 0;
    loop {
        let grid = Grid::new(size, n);
        let mut x = vec![CMat::zeros(m, m); size];
        let mut p = x.clone();
        let mut q = x.clone();
        let mut trace = Vec::new();
        for it in 1..=opts.max_iter {
            let mut y: Vec<CMat> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
            grid.project_affine(&mut y, &target);
            for ((pj, xj), yj) in p.iter_mut().zip(&x).zip(&y) {
                *pj = &*pj + xj - yj;
            }
            let mut violation = 0.0f64;
            for ((xj, yj), qj) in x.iter_mut().zip(&y).zip(q.iter_mut()) {
                let z = yj + &*qj;
                violation = violation.max(-linalg::min_eig_hermitian_part(yj));
                *xj = linalg::clip_psd(&z);
                *qj = z - &*xj;
            }
            let residual = dense_error(&grid.moment_residual(&x, &target)) / norm;
            if opts.record_trace {
                trace.push(DykstraStep {
                    affine_residual: dense_error(&grid.moment_residual(&y, &target)) / norm,
                    psd_violation: violation.max(0.0),
                    residual,
                });
            }
            best = best.min(residual);
            if residual < opts.tol {
                total += it;
                let atoms = x
                    .into_iter()
                    .enumerate()
                    .map(|(j, weight)| Atom {
                        lambda: circle(TAU * j as f64 / size as f64),
                        weight,
                    })
                    .collect();
                let atoms = AtomicMeasure::new(m, atoms)?;
                let shifted = t.add(&BlockToeplitz::identity(n, m).scale(opts.epsilon))?;
                let dense = (atoms.reassemble(n).matrix() - shifted.matrix()).norm() / norm;
                return Ok(SeparableDecomposition {
                    atoms,
                    epsilon: opts.epsilon,
                    residual: residual.max(dense),
                    grid: size,
                    iterations: total,
                    trace,
                });
            }
        }
        total += opts.max_iter;
        if 2 * size > max_grid {
            return Err(Error::NonConvergence {
                iterations: total,
                residual: best,
            });
        }
        size *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::toeplitz::pure_atom;

    fn reassembly_error(t: &BlockToeplitz, d: &SeparableDecomposition) -> f64 {
        let target = t
            .add(&BlockToeplitz::identity(t.order(), t.block_size()).scale(d.epsilon))
            .unwrap();
        (d.atoms.reassemble(t.order()).matrix() - target.matrix()).norm()
    }

    #[test]
    fn identity_on_minimal_grid_is_exact() {
        let (n, m) = (4, 2);
        let opts = SeparableOptions {
            grid: Some(2 * n - 1),
            ..Default::default()
        };
        let d = separable_decompose(&BlockToeplitz::identity(n, m), &opts, &Tolerance::default())
            .unwrap();
        assert_eq!(d.atoms.len(), 2 * n - 1);
        let expect = (1.0 + opts.epsilon) / (2 * n - 1) as f64;
        for a in &d.atoms.atoms {
            assert!((&a.weight - CMat::identity(m, m) * Complex64::new(expect, 0.0)).norm() < 1e-14);
        }
        assert_eq!(d.iterations, 1);
    }

    #[test]
    fn on_grid_atom_dominates() {
        let n = 3;
        let size = 8 * n;
        let lambda = circle(TAU * 5.0 / size as f64);
        let mut r = sampling::rng(8);
        let g = sampling::psd(&mut r, 2);
        let t = BlockToeplitz::kron(&pure_atom(n, lambda).unwrap(), &g);
        // T is singular, so the feasible set is only about eps / N thick and
        // a small eps converges slowly
        let opts = SeparableOptions {
            epsilon: 0.25,
            tol: 1e-6,
            ..Default::default()
        };
        let d = separable_decompose(&t, &opts, &Tolerance::default()).unwrap();
        assert!(d.residual < opts.tol);
        let heaviest = d
            .atoms
            .atoms
            .iter()
            .max_by(|a, b| a.weight.trace().re.total_cmp(&b.weight.trace().re))
            .unwrap();
        assert!((heaviest.lambda - lambda).norm() < 1e-12);
    }

    #[test]
    fn random_strictly_psd_converges() {
        let mut r = sampling::rng(21);
        let t = sampling::block_toeplitz_with_floor(&mut r, 3, 2, 0.1);
        let opts = SeparableOptions {
            record_trace: true,
            ..Default::default()
        };
        let tol = Tolerance::default();
        let d = separable_decompose(&t, &opts, &tol).unwrap();
        assert!(d.residual < 1e-6);
        assert!(d.atoms.min_weight_eig() >= -tol.eig_tol);
        assert!(reassembly_error(&t, &d) <= d.residual * (1.0 + t.frobenius()) * (1.0 + 1e-9));
        assert!(d.trace.iter().all(|s| s.affine_residual < 1e-12));
        let windows: Vec<f64> = d
            .trace
            .chunks(10)
            .map(|w| w.iter().map(|s| s.psd_violation).fold(0.0, f64::max))
            .collect();
        assert!(windows.windows(2).all(|p| p[1] <= p[0] + 1e-12));
    }

    #[test]
    fn rejects_non_psd() {
        let mut r = sampling::rng(1);
        let t = sampling::block_toeplitz_with_floor(&mut r, 2, 2, -0.1);
        assert!(matches!(
            separable_decompose(&t, &SeparableOptions::default(), &Tolerance::default()),
            Err(Error::NotPsd { .. })
        ));
    }
}

//! Spectral factorization `F(z) = H(z)* H(z)` of positive trigonometric
//! polynomials, with `H(z) = sum_{j=0}^{d} b_j z^j` analytic.
//!
//! Scalar symbols are factored exactly through the roots of `z^d f(z)`;
//! matrix symbols through a Bauer-type recursion, i.e. the block Cholesky
//! factorization of the growing banded block Toeplitz matrix of `F`.

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::tolerance::Tolerance;
use crate::trig::{circle_grid, BlockTrigPoly, TrigPoly};

/// Analytic factor `H` together with its convolution residual.
#[derive(Debug, Clone, PartialEq)]
pub struct FejerRieszFactor {
    /// `b_0, ..., b_d`.
    pub coeffs: Vec<CMat>,
    /// `max_l ||a_l - sum_{j in I_l} b_j* b_{l+j}||_F` against the input symbol.
    pub residual: f64,
    /// Block rows of the Bauer recursion (0 for direct factorizations).
    pub iterations: usize,
    /// Diagonal shift added to `a_0` before factoring.
    pub regularization: f64,
}

impl FejerRieszFactor {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn block_size(&self) -> usize {
        self.coeffs.first().map_or(0, |b| b.nrows())
    }

    /// `H` as a block trigonometric polynomial (negative offsets zero).
    pub fn as_block_poly(&self) -> BlockTrigPoly {
        let d = self.degree() as isize;
        let m = self.block_size();
        BlockTrigPoly::from_fn(d as usize, m, |k| {
            if k >= 0 {
                self.coeffs[k as usize].clone()
            } else {
                CMat::zeros(m, m)
            }
        })
    }

    /// `h` for a `1 x 1` factor.
    pub fn as_scalar_poly(&self) -> Option<TrigPoly> {
        (self.block_size() == 1).then(|| {
            TrigPoly::from_fn(self.degree(), |k| {
                if k >= 0 {
                    self.coeffs[k as usize][(0, 0)]
                } else {
                    Complex64::ZERO
                }
            })
        })
    }

    /// `H* H`.
    pub fn product(&self) -> BlockTrigPoly {
        BlockTrigPoly::from_analytic_factor(&self.coeffs).expect("nonempty factor")
    }
}

/// `max_l ||a_l - sum_{j in I_l} b_j* b_{l+j}||_F` where
/// `I_l = { j : 0 <= j <= d, 0 <= l + j <= d }`.
pub fn convolution_check(b: &[CMat], f: &BlockTrigPoly) -> f64 {
    let hd = b.len().saturating_sub(1) as isize;
    let top = hd.max(f.degree_bound() as isize);
    let m = f.block_size();
    let mut worst = 0.0f64;
    for l in -top..=top {
        let mut acc = f.coeff(l);
        for j in 0..=hd {
            let i = l + j;
            if (0..=hd).contains(&i) {
                acc -= b[j as usize].adjoint() * &b[i as usize];
            }
        }
        debug_assert_eq!(acc.nrows(), m);
        worst = worst.max(acc.norm());
    }
    worst
}

/// Sample count used to test positivity of a symbol on the circle.
pub(crate) fn grid_size(degree: usize) -> usize {
    (64 * degree).max(256)
}

/// Smallest eigenvalue of `F(z)` over a uniform grid.
pub fn grid_floor(f: &BlockTrigPoly, points: usize) -> f64 {
    circle_grid(points)
        .into_iter()
        .map(|z| linalg::min_eig_hermitian_part(&f.eval_unchecked(z)))
        .fold(f64::INFINITY, f64::min)
}

/// Radius around the circle inside which roots count as unimodular.
const ON_CIRCLE: f64 = 1e-6;

/// Scalar Fejér-Riesz: analytic `h` with `|h|^2 = f`.
pub fn factor_scalar(f: &TrigPoly, tol: &Tolerance) -> Result<FejerRieszFactor> {
    let norm = f.norm();
    if !f.is_selfadjoint(1e-12 * (1.0 + norm)) {
        return Err(Error::NotSelfAdjoint {
            deviation: f.sub(&f.adjoint()).norm(),
        });
    }
    let block = BlockTrigPoly::from_scalar(f, &CMat::identity(1, 1));
    let floor = grid_floor(&block, grid_size(f.degree_bound()));
    if floor < -tol.eig_tol * norm.max(1.0) {
        return Err(Error::NotPositive { min: floor });
    }

    let d = f.effective_degree();
    let h: Vec<Complex64> = if d == 0 {
        vec![c(f.coeff(0).re.max(0.0).sqrt(), 0.0)]
    } else {
        // z^d f(z) has coefficients a_{i-d}, i = 0..=2d
        let q: Vec<Complex64> = (0..=2 * d as isize).map(|i| f.coeff(i - d as isize)).collect();
        let roots = linalg::poly_roots(&q)?;
        let plain = select_roots(roots.clone(), d);
        let merged = {
            let mut chosen = Vec::with_capacity(d);
            let rest = merge_multiple_circle_roots(&q, roots, &mut chosen);
            select_roots(rest, d - chosen.len().min(d)).map(|mut r| {
                chosen.append(&mut r);
                chosen
            })
        };
        let mut best: Option<(Vec<CMat>, f64)> = None;
        let mut failure = None;
        for candidate in [plain, merged] {
            match candidate {
                Ok(chosen) if chosen.len() == d => {
                    let coeffs = scaled_factor(f, &chosen);
                    let residual = convolution_check(&coeffs, &block);
                    if best.as_ref().is_none_or(|b| residual < b.1) {
                        best = Some((coeffs, residual));
                    }
                }
                Ok(chosen) => {
                    failure.get_or_insert(Error::RootFinding(format!(
                        "root pairing selected {} roots, expected {d}",
                        chosen.len()
                    )));
                }
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        match best {
            Some((_, residual)) if residual >= tol.residual_tol * norm.max(1.0) => {
                return Err(Error::RootFinding(format!(
                    "best root selection leaves residual {residual:e}"
                )))
            }
            Some((coeffs, residual)) => {
                return Ok(FejerRieszFactor {
                    coeffs,
                    residual,
                    iterations: 0,
                    regularization: 0.0,
                })
            }
            None => return Err(failure.expect("a candidate failed")),
        }
    };
    let coeffs: Vec<CMat> = h.into_iter().map(|x| CMat::from_element(1, 1, x)).collect();
    let residual = convolution_check(&coeffs, &block);
    Ok(FejerRieszFactor {
        coeffs,
        residual,
        iterations: 0,
        regularization: 0.0,
    })
}

/// Keeps the roots inside the disk and one representative of every
/// unimodular pair.
fn select_roots(roots: Vec<Complex64>, d: usize) -> Result<Vec<Complex64>> {
    let mut chosen = Vec::with_capacity(d);
    let mut on_circle = Vec::new();
    for r in roots {
        let rad = r.norm();
        if rad < 1.0 - ON_CIRCLE {
            chosen.push(r);
        } else if rad <= 1.0 + ON_CIRCLE {
            on_circle.push(r);
        }
    }
    if on_circle.len() % 2 != 0 {
        return Err(Error::RootFinding(format!(
            "{} roots on the unit circle, expected an even count",
            on_circle.len()
        )));
    }
    while let Some(r) = on_circle.pop() {
        let (idx, _) = on_circle
            .iter()
            .enumerate()
            .map(|(i, s)| (i, (s - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("even count");
        let partner = on_circle.swap_remove(idx);
        let mid = (r + partner) * 0.5;
        chosen.push(mid / mid.norm());
    }
    if chosen.len() != d {
        return Err(Error::RootFinding(format!(
            "root pairing selected {} roots, expected {d}",
            chosen.len()
        )));
    }
    Ok(chosen)
}

/// `h = sqrt(s) prod (z - r_j)` with `s > 0` fitted so that `s |g|^2` matches
/// `f` over all coefficients.
fn scaled_factor(f: &TrigPoly, chosen: &[Complex64]) -> Vec<CMat> {
    let d = chosen.len();
    let g = linalg::poly_from_roots(chosen);
    let gg = TrigPoly::from_fn(d, |k| if k >= 0 { g[k as usize] } else { Complex64::ZERO })
        .abs_squared();
    let (mut num, mut den) = (0.0, 0.0);
    for k in -(d as isize)..=d as isize {
        num += (f.coeff(k) * gg.coeff(k).conj()).re;
        den += gg.coeff(k).norm_sqr();
    }
    let s = (num / den).max(0.0).sqrt();
    g.into_iter().map(|x| CMat::from_element(1, 1, x * s)).collect()
}

/// A root of multiplicity `m` on the circle comes back from the eigensolver as
/// a ring of `m` roots of radius about `eps^(1/m)`, which costs accuracy from
/// `m = 2` on and escapes [`ON_CIRCLE`] from `m = 3` on. Such a root is a simple root of `q^(m-1)`, so Newton on
/// that derivative from the cluster centroid recovers it. Clusters near the
/// circle whose refined center is unimodular contribute half their size in
/// copies of it; everything else is returned untouched.
fn merge_multiple_circle_roots(
    q: &[Complex64],
    roots: Vec<Complex64>,
    chosen: &mut Vec<Complex64>,
) -> Vec<Complex64> {
    const BAND: f64 = 1e-1;
    const LINK: f64 = 3e-2;
    let (band, mut rest): (Vec<Complex64>, Vec<Complex64>) =
        roots.into_iter().partition(|r| (r.norm() - 1.0).abs() < BAND);
    let mut label: Vec<usize> = (0..band.len()).collect();
    for i in 0..band.len() {
        for j in 0..i {
            if (band[i] - band[j]).norm() < LINK {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut().filter(|l| **l == a) {
                    *l = b;
                }
            }
        }
    }
    let mut seen: Vec<usize> = label.clone();
    seen.sort_unstable();
    seen.dedup();
    for id in seen {
        let members: Vec<Complex64> = band
            .iter()
            .zip(&label)
            .filter(|(_, &l)| l == id)
            .map(|(r, _)| *r)
            .collect();
        let mut centroid = members.iter().sum::<Complex64>() / members.len() as f64;
        if members.len() >= 2 {
            let mut p = q.to_vec();
            for _ in 1..members.len() {
                p = linalg::poly_derivative(&p);
            }
            let dp = linalg::poly_derivative(&p);
            for _ in 0..20 {
                let slope = linalg::poly_eval(&dp, centroid);
                if slope.norm() == 0.0 {
                    break;
                }
                let step = linalg::poly_eval(&p, centroid) / slope;
                centroid -= step;
                if step.norm() <= 1e-15 {
                    break;
                }
            }
        }
        if members.len() >= 2
            && members.len().is_multiple_of(2)
            && (centroid.norm() - 1.0).abs() <= ON_CIRCLE
        {
            let unit = centroid / centroid.norm();
            chosen.extend(std::iter::repeat_n(unit, members.len() / 2));
        } else {
            rest.extend(members);
        }
    }
    rest
}

/// Options for the matrix factorization.
#[derive(Debug, Clone, Copy)]
pub struct BauerOptions {
    /// Upper bound on block rows processed.
    pub max_iter: usize,
}

impl Default for BauerOptions {
    fn default() -> Self {
        Self { max_iter: 400_000 }
    }
}

/// Matrix Fejér-Riesz factorization of a PSD-valued `F`.
///
/// Streams the upper block Cholesky factor `U` of the semi-infinite banded
/// block Toeplitz matrix with blocks `A[r][c] = a_{c-r}`; block row `r` of `U`
/// converges to `(b_0, ..., b_d)`. The residual is checked at row counts
/// `16 d, 32 d, ...` and then every row once within `residual_tol`'s reach.
pub fn factor_matrix(
    f: &BlockTrigPoly,
    tol: &Tolerance,
    opts: BauerOptions,
) -> Result<FejerRieszFactor> {
    let m = f.block_size();
    let scale = f.max_coeff_norm();
    if !f.is_selfadjoint(1e-12 * (1.0 + scale)) {
        return Err(Error::NotSelfAdjoint {
            deviation: (0..=f.degree_bound() as isize)
                .map(|k| (f.coeff(-k) - f.coeff(k).adjoint()).norm())
                .fold(0.0, f64::max),
        });
    }
    let floor = grid_floor(f, grid_size(f.degree_bound()));
    if floor < -tol.eig_tol * scale.max(1.0) {
        return Err(Error::NotPsd { min_eig: floor });
    }
    let d = (0..=f.degree_bound())
        .rev()
        .find(|&k| f.coeff(k as isize).norm() > 0.0)
        .unwrap_or(0);

    if d == 0 {
        let b0 = upper_factor(&f.coeff(0));
        let coeffs = vec![b0];
        let residual = convolution_check(&coeffs, f);
        return Ok(FejerRieszFactor {
            coeffs,
            residual,
            iterations: 0,
            regularization: 0.0,
        });
    }

    let regularization = if floor < 1e-8 * scale { 1e-10 * scale } else { 0.0 };
    let a: Vec<CMat> = (0..=d as isize)
        .map(|k| {
            let mut ak = f.coeff(k);
            if k == 0 {
                for i in 0..m {
                    ak[(i, i)] += regularization;
                }
            }
            ak
        })
        .collect();

    // rows[i] holds (U_{i,i}, ..., U_{i,i+d}) for the last d rows
    let mut rows: std::collections::VecDeque<Vec<CMat>> = std::collections::VecDeque::new();
    let mut best: Option<(f64, Vec<CMat>, usize)> = None;
    let mut next_check = 16 * d;
    let mut close = false;
    for r in 0..opts.max_iter {
        let mut s: Vec<CMat> = a.clone();
        for (back, prev) in rows.iter().rev().enumerate() {
            // prev is row i = r - 1 - back; U_{i,r+c} = prev[r + c - i]
            let off = back + 1;
            let u_ir = &prev[off];
            for (cidx, sc) in s.iter_mut().enumerate() {
                if off + cidx <= d {
                    *sc -= u_ir.adjoint() * &prev[off + cidx];
                }
            }
        }
        let s0 = (&s[0] + s[0].adjoint()) * c(0.5, 0.0);
        let chol = Cholesky::new(s0).ok_or_else(|| Error::NonConvergence {
            iterations: r,
            residual: best.as_ref().map_or(f64::INFINITY, |b| b.0),
        })?;
        let l = chol.l();
        let mut row = Vec::with_capacity(d + 1);
        row.push(l.adjoint());
        for sc in &s[1..] {
            let x = l
                .solve_lower_triangular(sc)
                .expect("Cholesky factor is invertible");
            row.push(x);
        }
        rows.push_back(row);
        if rows.len() > d {
            rows.pop_front();
        }

        let iterations = r + 1;
        if iterations >= next_check || close {
            let cand = rows.back().expect("row just pushed").clone();
            let residual = convolution_check(&cand, f);
            if residual < tol.residual_tol {
                return Ok(FejerRieszFactor {
                    coeffs: cand,
                    residual,
                    iterations,
                    regularization,
                });
            }
            if best.as_ref().is_none_or(|b| residual < b.0) {
                best = Some((residual, cand, iterations));
            }
            // geometric phase is done; poll every row near the target
            close = residual < 1e3 * tol.residual_tol;
            if iterations >= next_check {
                next_check *= 2;
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: best.map_or(f64::INFINITY, |b| b.0),
    })
}

/// `b` with `b* b = a` for PSD `a`: Cholesky when possible, else the
/// Hermitian square root.
fn upper_factor(a: &CMat) -> CMat {
    let h = (a + a.adjoint()) * c(0.5, 0.0);
    if let Some(ch) = Cholesky::new(h.clone()) {
        return ch.l().adjoint();
    }
    let (values, vectors) = linalg::eigh_unchecked(h);
    let n = values.len();
    let mut out = CMat::zeros(n, n);
    for (k, v) in values.iter().enumerate() {
        let col = vectors.column(k);
        out += (col * col.adjoint()) * c(v.max(0.0).sqrt(), 0.0);
    }
    out
}

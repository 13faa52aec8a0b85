use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, c, CMat};

use super::two_level::{
    certify_two_level_min_positive, MinPositivityCertificate, OuterRealization, TwoLevelToeplitz,
};

/// `x = chi_0 (x) b_0 + chi_1 (x) b_1 + chi_{-1} (x) b_1*` with `b_0 = 3 I_2`
/// and `b_1(w) = [[w, 0], [2 conj(w), -w]]`.
pub fn minmax_symbol() -> TwoLevelToeplitz {
    let diag = linalg::real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let lower = linalg::real_matrix(2, 2, &[0.0, 0.0, 2.0, 0.0]);
    TwoLevelToeplitz::from_fn(2, 2, 2, OuterRealization::Function, |k, j| match (k, j) {
        (0, 0) => CMat::identity(2, 2) * c(3.0, 0.0),
        (1, 1) | (-1, -1) => diag.clone(),
        (1, -1) => lower.clone(),
        (-1, 1) => lower.adjoint(),
        _ => CMat::zeros(2, 2),
    })
}

/// The averaged obstruction `M(h11, h22)`, a real symmetric `4 x 4` matrix.
pub fn obstruction_matrix(h11: f64, h22: f64) -> CMat {
    #[rustfmt::skip]
    let data = [
        h11, 0.0, 1.0, 0.0,
        0.0, h22, 2.0, -1.0,
        1.0, 2.0, 3.0 - h11, 0.0,
        0.0, -1.0, 0.0, 3.0 - h22,
    ];
    linalg::real_matrix(4, 4, &data)
}

fn obstruction_floor(h: [f64; 2]) -> f64 {
    let h11 = h[0].clamp(0.0, 3.0);
    let h22 = h[1].clamp(0.0, 3.0);
    linalg::min_eig_hermitian_part(&obstruction_matrix(h11, h22))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMaxReport {
    /// Min-positivity certificate of the two-level symbol.
    pub certificate: MinPositivityCertificate,
    /// `max lambda_min(M(h11, h22))` over `[0, 3]^2`.
    pub obstruction_max: f64,
    pub obstruction_argmax: (f64, f64),
    /// `lambda_min(M(0, 0))`.
    pub obstruction_at_origin: f64,
    pub coarse_grid: usize,
}

impl MinMaxReport {
    /// Min-positive but not in the maximal cone.
    pub fn separates(&self) -> bool {
        self.certificate.certified && self.obstruction_max < 0.0
    }
}

/// Minimizes `f` from `start` by Nelder-Mead in two variables.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64, iters: usize) -> ([f64; 2], f64) {
    let mut simplex = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut values = simplex.map(&f);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..iters {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        if (values[2] - values[0]).abs() < 1e-15 {
            break;
        }
        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            (simplex[2], values[2]) = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < values[1] {
            (simplex[2], values[2]) = (reflected, fr);
        } else {
            let contracted = lerp(centroid, simplex[2], 0.5);
            let fc = f(contracted);
            if fc < values[2] {
                (simplex[2], values[2]) = (contracted, fc);
            } else {
                for i in 1..3 {
                    simplex[i] = lerp(simplex[0], simplex[i], 0.5);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    (simplex[best], values[best])
}

/// Certifies the two-level symbol min-positive on a `grid x grid` torus grid,
/// then maximizes `lambda_min(M)` over `[0, 3]^2` by a `201 x 201` search
/// refined with Nelder-Mead from the five best cells.
pub fn min_neq_max_demo(grid: usize) -> Result<MinMaxReport> {
    let certificate = certify_two_level_min_positive(&minmax_symbol(), grid)?;
    const COARSE: usize = 201;
    let h = |i: usize| 3.0 * i as f64 / (COARSE - 1) as f64;
    let mut cells: Vec<([f64; 2], f64)> = (0..COARSE)
        .flat_map(|a| (0..COARSE).map(move |b| [h(a), h(b)]))
        .map(|p| (p, obstruction_floor(p)))
        .collect();
    cells.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut best = cells[0];
    for &(start, _) in cells.iter().take(5) {
        let (p, v) = nelder_mead(|p| -obstruction_floor(p), start, 3.0 / (COARSE - 1) as f64, 400);
        let p = [p[0].clamp(0.0, 3.0), p[1].clamp(0.0, 3.0)];
        if -v > best.1 {
            best = (p, obstruction_floor(p));
        }
    }
    Ok(MinMaxReport {
        certificate,
        obstruction_max: best.1,
        obstruction_argmax: (best.0[0], best.0[1]),
        obstruction_at_origin: obstruction_floor([0.0, 0.0]),
        coarse_grid: COARSE,
    })
}

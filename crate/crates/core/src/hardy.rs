//! Finite sections of Toeplitz operators on the Hardy space and the
//! convergence of their spectral floors to the minimum of the symbol.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::toeplitz::ToeplitzMat;
use crate::trig::{circle, TrigPoly};

/// The `N x N` section of `T_f`, with entry `(l, j)` equal to `fhat(l - j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedToeplitzOp {
    symbol: TrigPoly,
    matrix: ToeplitzMat,
}

pub fn truncation(f: &TrigPoly, size: usize) -> Result<TruncatedToeplitzOp> {
    if size == 0 {
        return Err(Error::InvalidOrder("section size must be positive".into()));
    }
    Ok(TruncatedToeplitzOp {
        symbol: f.clone(),
        matrix: ToeplitzMat::from_fn(size, |k| f.coeff(k)),
    })
}

impl TruncatedToeplitzOp {
    pub fn symbol(&self) -> &TrigPoly {
        &self.symbol
    }

    pub fn size(&self) -> usize {
        self.matrix.order()
    }

    pub fn as_toeplitz(&self) -> &ToeplitzMat {
        &self.matrix
    }

    pub fn matrix(&self) -> CMat {
        self.matrix.matrix()
    }

    pub fn min_eig(&self) -> Result<f64> {
        linalg::min_eig(&self.matrix())
    }
}

/// Certified enclosure of `min_{S^1} f` for a real-valued `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleMinimum {
    pub grid: usize,
    pub grid_min: f64,
    /// A value of `f` attained at `argmin`, hence an upper bound.
    pub upper: f64,
    /// Lower bound valid on the whole circle.
    pub lower: f64,
    pub argmin: f64,
}

fn value(f: &TrigPoly, theta: f64) -> f64 {
    f.eval_unchecked(circle(theta)).re
}

fn slope(f: &TrigPoly, theta: f64) -> f64 {
    let d = f.degree_bound() as isize;
    (-d..=d)
        .map(|k| (f.coeff(k) * circle(k as f64 * theta)).im * -(k as f64))
        .sum()
}

/// Grid minimum on `grid` points, refined by branch and bound with the
/// second-order bound `f(t) >= f(m) - |f'(m)| r - M r^2 / 2` on each cell of
/// half-width `r` around `m`, until the enclosure is narrower than `gap`.
pub fn circle_minimum(f: &TrigPoly, grid: usize, gap: f64) -> Result<CircleMinimum> {
    if grid == 0 {
        return Err(Error::Precondition("grid size must be positive".into()));
    }
    if !f.is_selfadjoint(1e-12 * (1.0 + f.norm())) {
        return Err(Error::Precondition("symbol must be real-valued".into()));
    }
    let d = f.degree_bound() as isize;
    // sum k^2 |a_k| bounds |f''|
    let second: f64 = (-d..=d).map(|k| (k * k) as f64 * f.coeff(k).norm()).sum();
    let lower_on =
        |mid: f64, r: f64| value(f, mid) - slope(f, mid).abs() * r - 0.5 * second * r * r;
    let h = TAU / grid as f64;
    let mut upper = f64::INFINITY;
    let mut argmin = 0.0;
    let mut grid_min = f64::INFINITY;
    for i in 0..grid {
        let v = value(f, h * i as f64);
        grid_min = grid_min.min(v);
        if v < upper {
            upper = v;
            argmin = h * i as f64;
        }
    }
    // cells are (centre, half-width), centred between grid points
    let mut cells: Vec<(f64, f64)> = (0..grid).map(|i| (h * (i as f64 + 0.5), 0.5 * h)).collect();
    let mut lower;
    let mut budget = 1_000_000usize;
    loop {
        let mut next = Vec::new();
        lower = f64::INFINITY;
        for &(mid, r) in &cells {
            let v = value(f, mid);
            if v < upper {
                upper = v;
                argmin = mid;
            }
            let lo = lower_on(mid, r);
            if lo < upper - gap {
                next.push((mid - 0.5 * r, 0.5 * r));
                next.push((mid + 0.5 * r, 0.5 * r));
            }
            lower = lower.min(lo);
        }
        budget = budget.saturating_sub(cells.len());
        if next.is_empty() || budget == 0 {
            break;
        }
        cells = next;
    }
    Ok(CircleMinimum {
        grid,
        grid_min,
        upper,
        lower: lower.min(upper),
        argmin: argmin.rem_euclid(TAU),
    })
}

/// Default grid for [`circle_minimum`].
pub const CIRCLE_GRID: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorTrend {
    pub sizes: Vec<usize>,
    pub floors: Vec<f64>,
    pub circle_min: CircleMinimum,
    /// Floors are non-increasing along increasing sizes (slack `1e-12`).
    pub monotone: bool,
}

/// `lambda_min` of the `N x N` section for each requested `N`.
pub fn spectral_floor_trend(f: &TrigPoly, sizes: &[usize]) -> Result<FloorTrend> {
    if !f.is_selfadjoint(1e-12 * (1.0 + f.norm())) {
        return Err(Error::Precondition("symbol must be selfadjoint".into()));
    }
    let floors = sizes
        .iter()
        .map(|&n| truncation(f, n)?.min_eig())
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by_key(|&i| sizes[i]);
    let monotone = order
        .windows(2)
        .all(|p| floors[p[1]] <= floors[p[0]] + 1e-12);
    Ok(FloorTrend {
        sizes: sizes.to_vec(),
        floors,
        circle_min: circle_minimum(f, CIRCLE_GRID, 1e-12)?,
        monotone,
    })
}

/// `2 - 2 cos(pi / (N + 1))`, the smallest eigenvalue of the `(1, 2, 1)`
/// tridiagonal matrix of size `N`.
pub fn tridiagonal_floor(size: usize) -> f64 {
    2.0 - 2.0 * (PI / (size + 1) as f64).cos()
}

//! Positivity of block Toeplitz matrices: the eigenvalue test, its dual
//! description through Schur pairings with PSD-valued trigonometric
//! polynomials, grid-separable decompositions and two-level symbols.

mod minmax;
mod separable;
mod two_level;

pub use minmax::{min_neq_max_demo, minmax_symbol, obstruction_matrix, MinMaxReport};
pub use separable::{separable_decompose, DykstraStep, SeparableDecomposition, SeparableOptions};
pub use two_level::{
    certify_two_level_min_positive, MinPositivityCertificate, OuterRealization, TwoLevelToeplitz,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fejer_riesz::{grid_floor, grid_size};
use crate::linalg::{self, c, CMat, PsdReport};
use crate::sampling::{self, Rng64};
use crate::toeplitz::BlockToeplitz;
use crate::tolerance::{Tolerance, SELFADJOINT_SLACK};
use crate::trig::BlockTrigPoly;

fn check_selfadjoint(t: &BlockToeplitz) -> Result<()> {
    let scale = t.frobenius().max(1.0);
    if !t.is_selfadjoint(SELFADJOINT_SLACK * scale) {
        let b = t.order() as isize - 1;
        let deviation = (-b..=b)
            .map(|k| (t.symbol(-k) - t.symbol(k).adjoint()).norm())
            .fold(0.0, f64::max);
        return Err(Error::NotSelfAdjoint { deviation });
    }
    Ok(())
}

/// Eigenvalue test of the materialized `nm x nm` matrix.
pub fn min_psd_block(t: &BlockToeplitz, tol: &Tolerance) -> Result<PsdReport> {
    check_selfadjoint(t)?;
    linalg::is_psd(&t.matrix(), tol)
}

/// The `m x m` Schur sum `sum_k tau_{-k} o a_k` and its PSD verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurPairing {
    pub matrix: CMat,
    pub report: PsdReport,
    /// `<S 1, 1>` for the all-ones vector.
    pub ones_form: f64,
}

fn schur_sum(t: &BlockToeplitz, f: &BlockTrigPoly) -> Result<(CMat, f64)> {
    let m = t.block_size();
    if f.block_size() != m {
        return Err(Error::ShapeMismatch(format!(
            "block size {} of the symbol differs from {m}",
            f.block_size()
        )));
    }
    let bound = t.order() - 1;
    let d = f.degree_bound() as isize;
    let top = d.min(bound as isize);
    let beyond = (-d..=d)
        .filter(|k| k.unsigned_abs() > bound)
        .map(|k| f.coeff(k).norm())
        .fold(0.0, f64::max);
    if beyond > 0.0 {
        return Err(Error::DegreeMismatch {
            degree: f.degree_bound(),
            bound,
        });
    }
    let mut sum = CMat::zeros(m, m);
    let mut scale = 0.0;
    for k in -top..=top {
        let tau = t.symbol(-k);
        let a = f.coeff(k);
        scale += tau.norm() * a.norm();
        sum += tau.component_mul(&a);
    }
    Ok((sum, scale))
}

fn ones_form(s: &CMat) -> f64 {
    s.iter().map(|z| z.re).sum()
}

/// Pairs `T` against a PSD-valued symbol `F`.
pub fn schur_pairing_check(
    t: &BlockToeplitz,
    f: &BlockTrigPoly,
    tol: &Tolerance,
) -> Result<SchurPairing> {
    let (matrix, scale) = schur_sum(t, f)?;
    let fscale = f.max_coeff_norm().max(1.0);
    let floor = grid_floor(f, grid_size(f.degree_bound()));
    if floor < -tol.eig_tol * fscale {
        return Err(Error::NotPsd { min_eig: floor });
    }
    let min_eig = linalg::min_eig_hermitian_part(&matrix);
    Ok(SchurPairing {
        ones_form: ones_form(&matrix),
        report: PsdReport {
            psd: min_eig >= -tol.eig_tol * scale.max(1.0),
            min_eig,
        },
        matrix,
    })
}

/// A PSD-valued symbol whose Schur pairing with `T` is not PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Analytic factor `b_0..b_{n-1}`, so that `F = H* H`.
    pub factor: Vec<CMat>,
    pub symbol: BlockTrigPoly,
    /// The eigenvalue of `T` the witness is built from.
    pub eigenvalue: f64,
}

/// Builds `F = H* H` from a most negative eigenvector `v` of `T`: with
/// `w = conj(v)` split into blocks `w_i`, `H` has coefficients `e_1 w_i*`,
/// and then `<(sum_k tau_{-k} o a_k) 1, 1> = v* T v < 0`.
pub fn witness_for_nonpositivity(t: &BlockToeplitz, tol: &Tolerance) -> Result<Witness> {
    check_selfadjoint(t)?;
    let (n, m) = (t.order(), t.block_size());
    let (values, vectors) = linalg::eigh(&t.matrix())?;
    let eigenvalue = values[0];
    if eigenvalue >= -tol.eig_tol {
        return Err(Error::NoWitness);
    }
    let v = vectors.column(0);
    let factor: Vec<CMat> = (0..n)
        .map(|i| CMat::from_fn(m, m, |r, col| if r == 0 { v[i * m + col] } else { c(0.0, 0.0) }))
        .collect();
    let symbol = BlockTrigPoly::from_analytic_factor(&factor)?;
    Ok(Witness {
        factor,
        symbol,
        eigenvalue,
    })
}

/// Outcome of testing `T` both ways: by eigenvalues and by pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub min_psd: PsdReport,
    /// Number of random `F = H* H` paired against `T`.
    pub trials: usize,
    /// Smallest eigenvalue over the random Schur sums, relative to their scale.
    pub worst_relative_pairing_eig: f64,
    /// `<S 1, 1>` of the deterministic witness, when `T` is not PSD.
    pub witness_form: Option<f64>,
    /// Positivity as decided by the pairing protocol.
    pub pairing_psd: bool,
    pub agree: bool,
}

/// Decides positivity of `T` through Schur pairings: `trials` random
/// `F = H* H` of degree `n - 1`, plus the deterministic witness whenever the
/// eigenvalue test finds `T` not PSD; then compares with [`min_psd_block`].
pub fn equivalence_check(
    t: &BlockToeplitz,
    trials: usize,
    rng: &mut Rng64,
    tol: &Tolerance,
) -> Result<EquivalenceReport> {
    let min_psd = min_psd_block(t, tol)?;
    let (n, m) = (t.order(), t.block_size());
    let mut worst = f64::INFINITY;
    let mut random_psd = true;
    for _ in 0..trials {
        let f = sampling::psd_block_trig_poly(rng, m, n - 1);
        let (s, scale) = schur_sum(t, &f)?;
        let rel = linalg::min_eig_hermitian_part(&s) / scale.max(f64::MIN_POSITIVE);
        worst = worst.min(rel);
        random_psd &= rel >= -tol.eig_tol;
    }
    let witness_form = if min_psd.psd {
        None
    } else {
        let w = witness_for_nonpositivity(t, tol)?;
        let (s, _) = schur_sum(t, &w.symbol)?;
        Some(ones_form(&s))
    };
    let pairing_psd = random_psd && witness_form.is_none_or(|q| q >= -tol.eig_tol);
    Ok(EquivalenceReport {
        min_psd,
        trials,
        worst_relative_pairing_eig: worst,
        witness_form,
        pairing_psd,
        agree: pairing_psd == min_psd.psd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::pure_atom;
    use crate::trig::{circle, TrigPoly};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_blocks_are_psd() {
        assert!(min_psd_block(&BlockToeplitz::identity(3, 2), &tol()).unwrap().psd);
    }

    #[test]
    fn atom_times_psd_weight_is_psd() {
        let mut r = sampling::rng(5);
        let g = sampling::psd(&mut r, 3);
        let t = BlockToeplitz::kron(&pure_atom(4, circle(0.7)).unwrap(), &g);
        assert!(min_psd_block(&t, &tol()).unwrap().psd);
    }

    #[test]
    fn zero_diagonal_is_not_psd() {
        let t = BlockToeplitz::from_fn(2, 2, |k| match k {
            0 => CMat::zeros(2, 2),
            1 => CMat::identity(2, 2),
            _ => CMat::identity(2, 2),
        });
        let rep = min_psd_block(&t, &tol()).unwrap();
        assert!(!rep.psd && rep.min_eig < -0.5);
    }

    #[test]
    fn rejects_non_selfadjoint() {
        let t = BlockToeplitz::from_fn(2, 1, |k| CMat::from_element(1, 1, c(k as f64, 0.0)));
        assert!(matches!(min_psd_block(&t, &tol()), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn constant_symbol_reads_the_diagonal() {
        let mut r = sampling::rng(2);
        let t = sampling::block_toeplitz_with_floor(&mut r, 3, 3, 0.1);
        let f = BlockTrigPoly::from_scalar(&TrigPoly::chi(0), &CMat::identity(3, 3));
        let p = schur_pairing_check(&t, &f, &tol()).unwrap();
        let diag = CMat::from_diagonal(&t.symbol(0).diagonal());
        assert!((p.matrix - diag).norm() < 1e-14);
        assert!(p.report.psd);
    }

    #[test]
    fn pairing_rejects_bad_inputs() {
        let t = BlockToeplitz::identity(2, 2);
        let wrong_block = BlockTrigPoly::from_scalar(&TrigPoly::chi(0), &CMat::identity(3, 3));
        assert!(matches!(
            schur_pairing_check(&t, &wrong_block, &tol()),
            Err(Error::ShapeMismatch(_))
        ));
        let negative = BlockTrigPoly::from_scalar(&TrigPoly::constant(-1.0), &CMat::identity(2, 2));
        assert!(matches!(
            schur_pairing_check(&t, &negative, &tol()),
            Err(Error::NotPsd { .. })
        ));
        let too_long = BlockTrigPoly::from_scalar(&TrigPoly::chi(0).add(&TrigPoly::chi(2)).add(&TrigPoly::chi(-2)).add(&TrigPoly::constant(2.0)), &CMat::identity(2, 2));
        assert!(matches!(
            schur_pairing_check(&t, &too_long, &tol()),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn diagonal_witness() {
        let minus = linalg::real_matrix(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let t = BlockToeplitz::from_fn(3, 2, |k| if k == 0 { minus.clone() } else { CMat::zeros(2, 2) });
        let w = witness_for_nonpositivity(&t, &tol()).unwrap();
        let p = schur_pairing_check(&t, &w.symbol, &tol()).unwrap();
        assert!(p.ones_form < 0.0);
        assert!(!p.report.psd);
        // brute-force quadratic form against the all-ones vector
        let brute: f64 = p.matrix.iter().map(|z| z.re).sum();
        assert!((brute - w.eigenvalue).abs() < 1e-12);
    }

    #[test]
    fn psd_has_no_witness() {
        assert!(matches!(
            witness_for_nonpositivity(&BlockToeplitz::identity(2, 2), &tol()),
            Err(Error::NoWitness)
        ));
    }

    #[test]
    fn random_witnesses_verify() {
        let mut r = sampling::rng(11);
        for i in 0..100 {
            let n = 1 + i % 4;
            let m = 1 + (i / 4) % 4;
            let t = sampling::block_toeplitz_with_floor(&mut r, n, m, -0.05 - 0.01 * (i % 7) as f64);
            let w = witness_for_nonpositivity(&t, &tol()).unwrap();
            let p = schur_pairing_check(&t, &w.symbol, &tol()).unwrap();
            assert!(p.ones_form < 0.0, "instance {i}");
            assert!((p.ones_form - w.eigenvalue).abs() < 1e-10);
        }
    }

    #[test]
    fn psd_instances_pass_random_pairings() {
        let mut r = sampling::rng(3);
        let t = sampling::block_toeplitz_with_floor(&mut r, 3, 2, 0.2);
        let rep = equivalence_check(&t, 500, &mut r, &tol()).unwrap();
        assert!(rep.agree && rep.pairing_psd && rep.witness_form.is_none());
        let bad = sampling::block_toeplitz_with_floor(&mut r, 3, 2, -0.2);
        let rep = equivalence_check(&bad, 50, &mut r, &tol()).unwrap();
        assert!(rep.agree && !rep.pairing_psd && rep.witness_form.unwrap() < 0.0);
    }
}

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use toeplitz_cones::block_cones::min_neq_max_demo;
use toeplitz_cones::duality::{caratheodory_decompose, pair};
use toeplitz_cones::entanglement::{build_xi, certify_entangled, SeparabilityVerdict};
use toeplitz_cones::fejer_riesz::factor_scalar;
use toeplitz_cones::hardy::{circle_minimum, spectral_floor_trend, CIRCLE_GRID};
use toeplitz_cones::toeplitz::{pure_atom, ToeplitzMat};
use toeplitz_cones::trig::TrigPoly;
use toeplitz_cones::Tolerance;

fn err(e: toeplitz_cones::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn odd_len(v: &[Complex64], what: &str) -> PyResult<usize> {
    if v.len().is_multiple_of(2) {
        return Err(PyValueError::new_err(format!(
            "{what} needs an odd number of entries, got {}",
            v.len()
        )));
    }
    Ok(v.len() / 2)
}

/// Toeplitz matrix from its symbols `tau_{-n+1}, ..., tau_{n-1}`.
fn toeplitz(symbols: Vec<Complex64>) -> PyResult<ToeplitzMat> {
    let b = odd_len(&symbols, "a Toeplitz matrix")?;
    ToeplitzMat::new(b + 1, symbols).map_err(err)
}

/// Trigonometric polynomial from its coefficients `a_{-d}, ..., a_d`.
fn trig(coeffs: Vec<Complex64>) -> PyResult<TrigPoly> {
    let d = odd_len(&coeffs, "a trigonometric polynomial")?;
    TrigPoly::new(d, coeffs).map_err(err)
}

/// Smallest eigenvalue of a Toeplitz matrix and the PSD verdict.
#[pyfunction]
#[pyo3(signature = (symbols, eig_tol = Tolerance::DEFAULT_EIG))]
fn is_psd(symbols: Vec<Complex64>, eig_tol: f64) -> PyResult<(bool, f64)> {
    let tol = Tolerance::new(eig_tol, Tolerance::DEFAULT_RESIDUAL).map_err(err)?;
    let r = toeplitz(symbols)?.is_psd(&tol).map_err(err)?;
    Ok((r.psd, r.min_eig))
}

/// `sum_k tau_{-k} a_k`.
#[pyfunction]
fn pairing(symbols: Vec<Complex64>, coeffs: Vec<Complex64>) -> PyResult<Complex64> {
    pair(&toeplitz(symbols)?, &trig(coeffs)?).map_err(err)
}

/// Symbols of the rank-one atom at `lam`.
#[pyfunction]
fn atom(n: usize, lam: Complex64) -> PyResult<Vec<Complex64>> {
    Ok(pure_atom(n, lam).map_err(err)?.symbols().to_vec())
}

/// Analytic `h` (coefficients `b_0..b_d`) with `|h|^2 = f`, and the residual.
#[pyfunction]
fn fejer_riesz(coeffs: Vec<Complex64>) -> PyResult<(Vec<Complex64>, f64)> {
    let h = factor_scalar(&trig(coeffs)?, &Tolerance::default()).map_err(err)?;
    Ok((h.coeffs.iter().map(|b| b[(0, 0)]).collect(), h.residual))
}

/// Atoms `(lambda_j, w_j)` of a PSD Toeplitz matrix.
#[pyfunction]
fn caratheodory(symbols: Vec<Complex64>) -> PyResult<Vec<(Complex64, f64)>> {
    let m = caratheodory_decompose(&toeplitz(symbols)?, &Tolerance::default()).map_err(err)?;
    Ok(m.atoms.iter().map(|a| (a.lambda, a.weight[(0, 0)].re)).collect())
}

/// `"entangled"` or `"separable"` for `xi_n`.
#[pyfunction]
#[pyo3(signature = (n, samples = 1024))]
fn xi_verdict(n: usize, samples: usize) -> PyResult<&'static str> {
    let cert = certify_entangled(&build_xi(n).map_err(err)?, samples, Tolerance::DEFAULT_EIG)
        .map_err(err)?;
    Ok(match cert.verdict {
        SeparabilityVerdict::Entangled => "entangled",
        SeparabilityVerdict::Separable => "separable",
    })
}

/// `(certified margin, max obstruction eigenvalue)` of the min != max example.
#[pyfunction]
#[pyo3(signature = (grid = 1024))]
fn minmax(grid: usize) -> PyResult<(f64, f64)> {
    let r = min_neq_max_demo(grid).map_err(err)?;
    Ok((r.certificate.certified_margin, r.obstruction_max))
}

/// Section floors for each size and the certified `[lower, upper]` of `min f`.
#[pyfunction]
fn floors(coeffs: Vec<Complex64>, sizes: Vec<usize>) -> PyResult<(Vec<f64>, (f64, f64))> {
    let f = trig(coeffs)?;
    let t = spectral_floor_trend(&f, &sizes).map_err(err)?;
    let m = circle_minimum(&f, CIRCLE_GRID, 1e-12).map_err(err)?;
    Ok((t.floors, (m.lower, m.upper)))
}

/// Runs the command line in-process: `(exit code, report)`.
#[pyfunction]
fn run(args: Vec<String>) -> PyResult<(u8, String)> {
    let out = toeplitz_cones::cli::run_args(std::iter::once("toeplitz-cones".to_string()).chain(args))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((out.code, out.output))
}

#[pymodule]
#[pyo3(name = "toeplitz_cones")]
fn py_toeplitz_cones(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(is_psd, m)?)?;
    m.add_function(wrap_pyfunction!(pairing, m)?)?;
    m.add_function(wrap_pyfunction!(atom, m)?)?;
    m.add_function(wrap_pyfunction!(fejer_riesz, m)?)?;
    m.add_function(wrap_pyfunction!(caratheodory, m)?)?;
    m.add_function(wrap_pyfunction!(xi_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(minmax, m)?)?;
    m.add_function(wrap_pyfunction!(floors, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}

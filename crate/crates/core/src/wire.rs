//! JSON shapes of the domain types. Complex numbers are `[re, im]`,
//! matrices are row-major nested arrays, and symbol or coefficient lists run
//! from the most negative offset to the most positive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::duality::{Atom, AtomicMeasure};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::toeplitz::{BlockToeplitz, ToeplitzMat};
use crate::trig::{BlockTrigPoly, TrigPoly};

pub type MatrixJson = Vec<Vec<Complex64>>;

pub fn matrix_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMat> {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != cols) {
        return Err(Error::Malformed("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(r, cols, |i, j| rows[i][j]))
}

fn square(rows: &MatrixJson, m: usize) -> Result<CMat> {
    let a = matrix_from_json(rows)?;
    if a.shape() != (m, m) {
        return Err(Error::Malformed(format!(
            "expected a {m}x{m} matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPolyJson {
    pub d: usize,
    pub coeffs: Vec<Complex64>,
}

impl From<TrigPoly> for TrigPolyJson {
    fn from(p: TrigPoly) -> Self {
        Self {
            d: p.degree_bound(),
            coeffs: p.coeffs().to_vec(),
        }
    }
}

impl TryFrom<TrigPolyJson> for TrigPoly {
    type Error = Error;
    fn try_from(j: TrigPolyJson) -> Result<Self> {
        TrigPoly::new(j.d, j.coeffs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToeplitzJson {
    pub n: usize,
    pub symbols: Vec<Complex64>,
}

impl From<ToeplitzMat> for ToeplitzJson {
    fn from(t: ToeplitzMat) -> Self {
        Self {
            n: t.order(),
            symbols: t.symbols().to_vec(),
        }
    }
}

impl TryFrom<ToeplitzJson> for ToeplitzMat {
    type Error = Error;
    fn try_from(j: ToeplitzJson) -> Result<Self> {
        ToeplitzMat::new(j.n, j.symbols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockToeplitzJson {
    pub n: usize,
    pub m: usize,
    pub symbols: Vec<MatrixJson>,
}

impl From<BlockToeplitz> for BlockToeplitzJson {
    fn from(t: BlockToeplitz) -> Self {
        Self {
            n: t.order(),
            m: t.block_size(),
            symbols: t.symbols().iter().map(matrix_to_json).collect(),
        }
    }
}

impl TryFrom<BlockToeplitzJson> for BlockToeplitz {
    type Error = Error;
    fn try_from(j: BlockToeplitzJson) -> Result<Self> {
        let symbols = j
            .symbols
            .iter()
            .map(|s| square(s, j.m))
            .collect::<Result<Vec<_>>>()?;
        BlockToeplitz::new(j.n, j.m, symbols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockTrigPolyJson {
    pub d: usize,
    pub m: usize,
    pub coeffs: Vec<MatrixJson>,
}

impl From<BlockTrigPoly> for BlockTrigPolyJson {
    fn from(p: BlockTrigPoly) -> Self {
        Self {
            d: p.degree_bound(),
            m: p.block_size(),
            coeffs: p.coeffs().iter().map(matrix_to_json).collect(),
        }
    }
}

impl TryFrom<BlockTrigPolyJson> for BlockTrigPoly {
    type Error = Error;
    fn try_from(j: BlockTrigPolyJson) -> Result<Self> {
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| square(s, j.m))
            .collect::<Result<Vec<_>>>()?;
        BlockTrigPoly::new(j.d, j.m, coeffs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub lambda: Complex64,
    pub w: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomicMeasureJson {
    pub m: usize,
    pub atoms: Vec<AtomJson>,
}

impl From<AtomicMeasure> for AtomicMeasureJson {
    fn from(a: AtomicMeasure) -> Self {
        Self {
            m: a.block_size,
            atoms: a
                .atoms
                .iter()
                .map(|x| AtomJson {
                    lambda: x.lambda,
                    w: matrix_to_json(&x.weight),
                })
                .collect(),
        }
    }
}

impl TryFrom<AtomicMeasureJson> for AtomicMeasure {
    type Error = Error;
    fn try_from(j: AtomicMeasureJson) -> Result<Self> {
        let atoms = j
            .atoms
            .iter()
            .map(|a| {
                Ok(Atom {
                    lambda: a.lambda,
                    weight: square(&a.w, j.m)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        AtomicMeasure::new(j.m, atoms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn round_trip<T>(v: &T) -> T
    where
        T: Serialize + for<'de> Deserialize<'de>,
    {
        serde_json::from_str(&serde_json::to_string(v).unwrap()).unwrap()
    }

    #[test]
    fn domain_types_round_trip() {
        let mut r = sampling::rng(1);
        let p = sampling::trig_poly(&mut r, 3);
        assert_eq!(round_trip(&p), p);
        let t = sampling::toeplitz(&mut r, 4);
        assert_eq!(round_trip(&t), t);
        let b = sampling::hermitian_block_toeplitz(&mut r, 3, 2);
        assert_eq!(round_trip(&b), b);
        let f = sampling::psd_block_trig_poly(&mut r, 2, 2);
        assert_eq!(round_trip(&f), f);
        let a = AtomicMeasure::scalar([(crate::trig::circle(0.5), 1.5)]);
        assert_eq!(round_trip(&a), a);
    }

    #[test]
    fn shapes() {
        let p = TrigPoly::chi(1);
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"d":1,"coeffs":[[0.0,0.0],[0.0,0.0],[1.0,0.0]]}"#
        );
        let bad = r#"{"n":2,"m":2,"symbols":[[[[1,0]]],[[[1,0]]],[[[1,0]]]]}"#;
        assert!(serde_json::from_str::<BlockToeplitz>(bad).is_err());
        let short = r#"{"d":1,"coeffs":[[1,0]]}"#;
        assert!(serde_json::from_str::<TrigPoly>(short).is_err());
    }
}

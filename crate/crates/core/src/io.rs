//! JSON encodings shared by several modules: complex numbers as `[re, im]`
//! pairs and matrices as row-major nested arrays of pairs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMat;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMat> {
    let n = rows.len();
    let k = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidMatrix("ragged rows".into()));
    }
    let mut m = CMat::zeros(n, k);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(Error::InvalidMatrix(format!("non-finite entry at ({i},{j})")));
            }
            m[(i, j)] = Complex64::new(v[0], v[1]);
        }
    }
    Ok(m)
}

/// Parse `"re,im"` (or a bare real `"re"`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| Error::BadParameters(format!("cannot parse complex `{s}`")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::BadParameters(format!("cannot parse complex `{s}`"))),
    }
}

//! Small dense complex linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_REL_TOL: f64 = 1e-10;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn scalar(v: Complex64) -> CMat {
    CMat::from_element(1, 1, v)
}

pub fn from_real_diag(d: &[f64]) -> CMat {
    let mut m = CMat::zeros(d.len(), d.len());
    for (i, &v) in d.iter().enumerate() {
        m[(i, i)] = Complex64::new(v, 0.0);
    }
    m
}

/// Largest entry magnitude of `m`.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()))
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn require_hermitian(m: &CMat, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidMatrix(format!("{what} is not square ({}x{})", m.nrows(), m.ncols())));
    }
    let scale = max_abs(m).max(1.0);
    let d = hermitian_defect(m);
    if d > HERMITIAN_TOL * scale {
        return Err(Error::InvalidMatrix(format!("{what} is not Hermitian (defect {d:e})")));
    }
    Ok(())
}

/// Hermitian part `(m + m*)/2`, used to strip rounding noise after
/// products that are Hermitian in exact arithmetic.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Each eigenvector is rotated so that its largest component is real and
/// positive, making the decomposition reproducible.
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let eig = SymmetricEigen::try_new(hermitize(m), 1e-15, 10_000).ok_or(Error::EigensolverFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vecs = CMat::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let pivot = col.iter().copied().fold(Complex64::new(0.0, 0.0), |best, v| {
            if v.norm() > best.norm() + 1e-14 {
                v
            } else {
                best
            }
        });
        let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            vecs[(i, dst)] = col[i] * phase;
        }
    }
    Ok((vals, vecs))
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &CMat) -> Result<f64> {
    let (vals, _) = eigh(m)?;
    Ok(vals.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
}

/// Factor a PSD matrix as `W = F* F` with `F` of shape `rank × k`, the rows
/// being `√μ v*` over the eigenpairs above the rank threshold. Eigenvalues in
/// `[−1e-10‖W‖, 0)` are treated as zero.
pub fn psd_factor(w: &CMat) -> Result<CMat> {
    let (vals, vecs) = eigh(w)?;
    let norm = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let min = vals.first().copied().unwrap_or(0.0);
    if min < -PSD_REL_TOL * norm {
        return Err(Error::NotPsd(min));
    }
    let cutoff = PSD_REL_TOL * norm;
    let keep: Vec<usize> = (0..vals.len()).rev().filter(|&j| vals[j] > cutoff && vals[j] > 0.0).collect();
    let k = w.ncols();
    let mut f = CMat::zeros(keep.len(), k);
    for (row, &j) in keep.iter().enumerate() {
        let s = vals[j].sqrt();
        for col in 0..k {
            f[(row, col)] = vecs[(col, j)].conj() * s;
        }
    }
    Ok(f)
}

pub fn is_psd(w: &CMat) -> Result<bool> {
    let (vals, _) = eigh(w)?;
    let norm = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(vals.first().map_or(true, |&m| m >= -PSD_REL_TOL * norm))
}

/// 2-norm condition number via singular values.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solve `a x = b` by LU with partial pivoting.
pub fn solve(a: &CMat, b: &CMat) -> Option<CMat> {
    a.clone().lu().solve(b)
}

pub fn inverse(a: &CMat) -> Option<CMat> {
    a.clone().lu().try_inverse()
}

/// Minimum eigenvalue of the Hermitian part `(m − m*)/(2i)`.
pub fn min_eig_imag_part(m: &CMat) -> Result<f64> {
    let im = (m - m.adjoint()).map(|v| v * Complex64::new(0.0, -0.5));
    let (vals, _) = eigh(&im)?;
    Ok(vals.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn psd_factor_reconstructs_rank_deficient_weight() {
        let v = CMat::from_row_slice(2, 1, &[c(1.0, 0.0), c(0.0, 2.0)]);
        let w = &v * v.adjoint();
        let f = psd_factor(&w).unwrap();
        assert_eq!(f.nrows(), 1);
        assert!(max_abs(&(f.adjoint() * &f - &w)) < 1e-14);
    }

    #[test]
    fn psd_factor_rejects_indefinite() {
        let w = from_real_diag(&[1.0, -0.5]);
        assert!(matches!(psd_factor(&w), Err(Error::NotPsd(_))));
    }

    #[test]
    fn eigh_sorts_and_fixes_phase() {
        let m = from_real_diag(&[3.0, -1.0, 2.0]);
        let (vals, vecs) = eigh(&m).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        assert!((vecs[(1, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((vecs[(0, 2)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hermitian_check() {
        let mut m = from_real_diag(&[1.0, 2.0]);
        assert!(require_hermitian(&m, "m").is_ok());
        m[(0, 1)] = c(0.0, 1.0);
        assert!(require_hermitian(&m, "m").is_err());
    }
}

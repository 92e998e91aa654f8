//! Finite-rank perturbations `H_L = H₀ + K L K*` of Hermitian matrices, their
//! matrix-valued m-functions and spectral measures, and the inverse problem:
//! realizing a finitely supported matrix measure by a minimal dilation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmath::c;
use crate::error::{Error, Result};
use crate::herglotz::JUnitary;
use crate::io::{self, JsonMatrix};
use crate::linalg::{self, CMat};
use crate::measures::{Kernel, MatrixAtom, MatrixMeasure};

pub const EIGEN_MERGE_TOL: f64 = 1e-10;
pub const RANK_TOL: f64 = 1e-10;

/// `(H₀, K, L)` with `H₀` `n×n` Hermitian, `K` `n×k`, `L` `k×k` Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationTriple {
    h0: CMat,
    k: CMat,
    l: CMat,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripleJson {
    #[serde(rename = "H0")]
    h0: JsonMatrix,
    #[serde(rename = "K")]
    k: JsonMatrix,
    #[serde(rename = "L")]
    l: JsonMatrix,
}

impl PerturbationTriple {
    pub fn new(h0: CMat, k: CMat, l: CMat) -> Result<Self> {
        linalg::require_hermitian(&h0, "H0")?;
        linalg::require_hermitian(&l, "L")?;
        let n = h0.nrows();
        if k.nrows() != n {
            return Err(Error::InvalidMatrix(format!("K has {} rows, H0 is {n}x{n}", k.nrows())));
        }
        if l.nrows() != k.ncols() {
            return Err(Error::InvalidMatrix(format!("L is {}x{}, K has {} columns", l.nrows(), l.ncols(), k.ncols())));
        }
        if k.ncols() > n {
            return Err(Error::InvalidMatrix(format!("K has more columns ({}) than rows ({n})", k.ncols())));
        }
        Ok(PerturbationTriple { h0: linalg::hermitize(&h0), k, l: linalg::hermitize(&l) })
    }

    pub fn h0(&self) -> &CMat {
        &self.h0
    }

    pub fn k(&self) -> &CMat {
        &self.k
    }

    pub fn l(&self) -> &CMat {
        &self.l
    }

    pub fn n(&self) -> usize {
        self.h0.nrows()
    }

    pub fn rank(&self) -> usize {
        self.k.ncols()
    }

    /// The same `H₀, K` with another coupling `L`.
    pub fn with_l(&self, l: CMat) -> Result<Self> {
        PerturbationTriple::new(self.h0.clone(), self.k.clone(), l)
    }

    pub fn h_l(&self) -> CMat {
        linalg::hermitize(&(&self.h0 + &self.k * &self.l * self.k.adjoint()))
    }

    /// `K*(H − z)⁻¹K` for a Hermitian `H`.
    fn compressed_resolvent(&self, h: &CMat, z: Complex64) -> Result<CMat> {
        if z.im.abs() < 1e-12 {
            return Err(Error::NearSingularResolvent(z.im.abs()));
        }
        let n = h.nrows();
        let shifted = h - linalg::identity(n).map(|v| v * z);
        let x = linalg::solve(&shifted, &self.k).ok_or(Error::NearSingularResolvent(z.im.abs()))?;
        Ok(self.k.adjoint() * x)
    }

    /// `M_L(z) = K*(H_L − z)⁻¹K`.
    pub fn m_function(&self, z: Complex64) -> Result<CMat> {
        self.compressed_resolvent(&self.h_l(), z)
    }

    /// `K*(H₀ − z)⁻¹K`.
    pub fn m_function_unperturbed(&self, z: Complex64) -> Result<CMat> {
        self.compressed_resolvent(&self.h0, z)
    }

    /// `Ω_L = K* E_L(·) K`, atoms at the eigenvalues of `H_L`.
    pub fn spectral_measure(&self) -> Result<MatrixMeasure> {
        spectral_measure_of(&self.h_l(), &self.k)
    }

    /// `‖(I + L K*(H₀−z)⁻¹K)(I − L K*(H_L−z)⁻¹K) − I‖_max`.
    pub fn resolvent_identity_residual(&self, z: Complex64) -> Result<f64> {
        let k = self.rank();
        let id = linalg::identity(k);
        let a = &id + &self.l * self.m_function_unperturbed(z)?;
        let b = &id - &self.l * self.m_function(z)?;
        Ok(linalg::max_abs(&(a * b - id)))
    }

    /// Dimension of the span of `{E₀({λ_j}) K e_n}`.
    pub fn generating_dimension(&self) -> Result<usize> {
        Ok(self.generating_basis()?.ncols())
    }

    fn generating_basis(&self) -> Result<CMat> {
        let (vals, vecs) = linalg::eigh(&self.h0)?;
        let clusters = cluster_eigenvalues(&vals);
        let n = self.n();
        let k = self.rank();
        let mut stacked = CMat::zeros(n, clusters.len() * k);
        for (ci, (start, end)) in clusters.iter().enumerate() {
            let v = vecs.columns(*start, end - start);
            let pk = &v * (v.adjoint() * &self.k);
            stacked.view_mut((0, ci * k), (n, k)).copy_from(&pk);
        }
        let svd = stacked.svd(true, false);
        let u = svd.u.ok_or(Error::EigensolverFailure)?;
        let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
        let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > RANK_TOL * smax.max(1e-300)).collect();
        let mut q = CMat::zeros(n, keep.len());
        for (dst, &src) in keep.iter().enumerate() {
            q.set_column(dst, &u.column(src));
        }
        Ok(q)
    }

    /// Compression to the subspace generated by `H₀` from `ran K`; it has
    /// the same m-function for every `L`.
    pub fn reduced(&self) -> Result<PerturbationTriple> {
        let q = self.generating_basis()?;
        PerturbationTriple::new(q.adjoint() * &self.h0 * &q, q.adjoint() * &self.k, self.l.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TripleJson { h0: io::matrix_to_json(&self.h0), k: io::matrix_to_json(&self.k), l: io::matrix_to_json(&self.l) }).expect("triple serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: TripleJson = serde_json::from_value(v.clone())?;
        PerturbationTriple::new(io::matrix_from_json(&j.h0)?, io::matrix_from_json(&j.k)?, io::matrix_from_json(&j.l)?)
    }
}

/// Index ranges of eigenvalues (sorted ascending) within the merge tolerance.
fn cluster_eigenvalues(vals: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > EIGEN_MERGE_TOL * vals[i].abs().max(1.0) {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// `K* E(·) K` for a Hermitian `H`.
pub fn spectral_measure_of(h: &CMat, k: &CMat) -> Result<MatrixMeasure> {
    let (vals, vecs) = linalg::eigh(h)?;
    let mut atoms = Vec::new();
    for (start, end) in cluster_eigenvalues(&vals) {
        let v = vecs.columns(start, end - start);
        let vk = v.adjoint() * k;
        let weight = linalg::hermitize(&(vk.adjoint() * vk));
        let x = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        atoms.push(MatrixAtom { x, weight });
    }
    MatrixMeasure::new(k.ncols(), atoms)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LftReport {
    /// `M₂ = M₁(I + ΔM₁)⁻¹`
    pub right_form: f64,
    /// `M₂ = (I + M₁Δ)⁻¹M₁`
    pub left_form: f64,
    /// `ΔM₂ − I = −(ΔM₁ + I)⁻¹`
    pub right_inverse: f64,
    /// `M₂Δ − I = −(M₁Δ + I)⁻¹`
    pub left_inverse: f64,
    /// J-unitarity residual of the block map `[[I, Δ], [0, I]]`.
    pub j_residual: f64,
    /// Residual of applying that block map to `M₁` as a linear fractional map.
    pub lft_form: f64,
}

impl LftReport {
    pub fn max(&self) -> f64 {
        [self.right_form, self.left_form, self.right_inverse, self.left_inverse, self.j_residual, self.lft_form].into_iter().fold(0.0, f64::max)
    }
}

/// Residuals (relative to `max(1, ‖M‖)`) of the identities relating the
/// m-functions of two couplings over a common `(H₀, K)`.
pub fn lft_consistency(t1: &PerturbationTriple, t2: &PerturbationTriple, grid: &[Complex64]) -> Result<LftReport> {
    if t1.h0 != t2.h0 || t1.k != t2.k {
        return Err(Error::InvalidMatrix("triples must share H0 and K".into()));
    }
    let k = t1.rank();
    let id = linalg::identity(k);
    let delta = &t2.l - &t1.l;
    let a = JUnitary::between_perturbations(&t1.l, &t2.l)?;
    let mut rep = LftReport { right_form: 0.0, left_form: 0.0, right_inverse: 0.0, left_inverse: 0.0, j_residual: a.residual(), lft_form: 0.0 };
    for &z in grid {
        let m1 = t1.m_function(z)?;
        let m2 = t2.m_function(z)?;
        let scale = linalg::max_abs(&m1).max(linalg::max_abs(&m2)).max(1.0);
        let singular = |m: &CMat| {
            let cond = linalg::condition_number(m);
            if cond < crate::herglotz::MAX_DENOMINATOR_CONDITION {
                Ok(())
            } else {
                Err(Error::SingularDenominator { z, condition: cond })
            }
        };
        let right_den = &id + &delta * &m1;
        let left_den = &id + &m1 * &delta;
        singular(&right_den)?;
        singular(&left_den)?;
        let right_inv = linalg::inverse(&right_den).ok_or(Error::SingularDenominator { z, condition: f64::INFINITY })?;
        let left_inv = linalg::inverse(&left_den).ok_or(Error::SingularDenominator { z, condition: f64::INFINITY })?;
        rep.right_form = rep.right_form.max(linalg::max_abs(&(&m2 - &m1 * &right_inv)) / scale);
        rep.left_form = rep.left_form.max(linalg::max_abs(&(&m2 - &left_inv * &m1)) / scale);
        rep.right_inverse = rep.right_inverse.max(linalg::max_abs(&(&delta * &m2 - &id + &right_inv)) / scale);
        rep.left_inverse = rep.left_inverse.max(linalg::max_abs(&(&m2 * &delta - &id + &left_inv)) / scale);
        rep.lft_form = rep.lft_form.max(linalg::max_abs(&(a.apply(&m1, z)? - &m2)) / scale);
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// `n × r`, columns `|μ_j|^{1/2} v_j`.
    pub k0: CMat,
    /// `r × r` diagonal of signs.
    pub l0: CMat,
    pub rank: usize,
    pub kernel_dim: usize,
    pub reconstruction_error: f64,
}

/// `V = K₀ L₀ K₀*` with `K₀ = |V₀|^{1/2}` on `ran V` and `L₀ = sgn V₀`.
pub fn decompose_bounded(v: &CMat) -> Result<Decomposition> {
    linalg::require_hermitian(v, "V")?;
    let n = v.nrows();
    let (vals, vecs) = linalg::eigh(v)?;
    let norm = vals.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let mut keep: Vec<usize> = (0..n).filter(|&j| vals[j].abs() > RANK_TOL * norm.max(1e-300) && vals[j] != 0.0).collect();
    keep.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let r = keep.len();
    let mut k0 = CMat::zeros(n, r);
    let mut signs = Vec::with_capacity(r);
    for (dst, &j) in keep.iter().enumerate() {
        let s = vals[j].abs().sqrt();
        k0.set_column(dst, &vecs.column(j).map(|x| x * s));
        signs.push(vals[j].signum());
    }
    let l0 = linalg::from_real_diag(&signs);
    let err = linalg::max_abs(&(&k0 * &l0 * k0.adjoint() - v));
    Ok(Decomposition { k0, l0, rank: r, kernel_dim: n - r, reconstruction_error: err })
}

// ---------------------------------------------------------------------------
// Dilation

/// `H = diag(eigenvalues)`, `K` of shape `N × k`, with `K* E({λ_j}) K` equal
/// to the weight of atom `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    pub eigenvalues: Vec<f64>,
    pub k: CMat,
    /// `(location, first row, number of rows)` per atom.
    pub atom_index: Vec<(f64, usize, usize)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DilationJson {
    eigenvalues: Vec<f64>,
    #[serde(rename = "K")]
    k: JsonMatrix,
}

impl Dilation {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn h(&self) -> CMat {
        linalg::from_real_diag(&self.eigenvalues)
    }

    /// `K*(H − z)⁻¹K`.
    pub fn m_function(&self, z: Complex64) -> CMat {
        let scaled = CMat::from_fn(self.k.nrows(), self.k.ncols(), |i, j| self.k[(i, j)] / (c(self.eigenvalues[i], 0.0) - z));
        self.k.adjoint() * scaled
    }

    /// `K* E({λ_j}) K`.
    pub fn atom_weight(&self, atom: usize) -> CMat {
        let (_, start, len) = self.atom_index[atom];
        let rows = self.k.rows(start, len);
        rows.adjoint() * rows
    }

    /// The dilation as a perturbation triple with `L = 0`.
    pub fn as_triple(&self) -> Result<PerturbationTriple> {
        let k = self.k.ncols();
        if self.dimension() < k {
            return Err(Error::InvalidMatrix(format!("dilation of dimension {} is smaller than k = {k}", self.dimension())));
        }
        PerturbationTriple::new(self.h(), self.k.clone(), CMat::zeros(k, k))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DilationJson { eigenvalues: self.eigenvalues.clone(), k: io::matrix_to_json(&self.k) }).expect("dilation serializes")
    }

    /// Reads the export format; atoms are regrouped by equal eigenvalues.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: DilationJson = serde_json::from_value(v.clone())?;
        let k = io::matrix_from_json(&j.k)?;
        if k.nrows() != j.eigenvalues.len() {
            return Err(Error::InvalidMatrix("K must have one row per eigenvalue".into()));
        }
        if j.eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite eigenvalue".into()));
        }
        let mut atom_index: Vec<(f64, usize, usize)> = Vec::new();
        for (i, &x) in j.eigenvalues.iter().enumerate() {
            match atom_index.last_mut() {
                Some(last) if last.0 == x => last.2 += 1,
                _ => atom_index.push((x, i, 1)),
            }
        }
        Ok(Dilation { eigenvalues: j.eigenvalues, k, atom_index })
    }
}

/// Minimal dilation: atom `j` contributes `rank W_j` rows `√μ v*` from the
/// eigenpairs of `W_j`, all with eigenvalue `λ_j`.
pub fn naimark_dilate(omega: &MatrixMeasure) -> Result<Dilation> {
    let k = omega.dimension();
    let mut blocks = Vec::new();
    let mut eigenvalues = Vec::new();
    let mut atom_index = Vec::new();
    for atom in omega.atoms() {
        let f = linalg::psd_factor(&atom.weight)?;
        if f.nrows() == 0 {
            continue;
        }
        atom_index.push((atom.x, eigenvalues.len(), f.nrows()));
        eigenvalues.extend(std::iter::repeat_n(atom.x, f.nrows()));
        blocks.push(f);
    }
    let mut kmat = CMat::zeros(eigenvalues.len(), k);
    let mut row = 0;
    for f in blocks {
        kmat.view_mut((row, 0), (f.nrows(), k)).copy_from(&f);
        row += f.nrows();
    }
    Ok(Dilation { eigenvalues, k: kmat, atom_index })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationReport {
    pub grid: Vec<Complex64>,
    /// `max_z ‖K*(H−z)⁻¹K − ∫dΩ/(λ−z)‖ / max(1, ‖·‖)`.
    pub max_residual: f64,
    /// `‖K*K − Ω(ℝ)‖_max`.
    pub total_mass_residual: f64,
}

pub const REALIZATION_TOL: f64 = 1e-10;

/// 20 points in the upper half-plane spread over the support of `omega`.
pub fn verification_grid(omega: &MatrixMeasure) -> Vec<Complex64> {
    let (lo, hi) = match (omega.atoms().first(), omega.atoms().last()) {
        (Some(a), Some(b)) => (a.x - 1.0, b.x + 1.0),
        _ => (-1.0, 1.0),
    };
    (0..20)
        .map(|i| {
            let t = i as f64 / 19.0;
            let y = 10f64.powf(-1.0 + 2.0 * ((i * 7) % 20) as f64 / 19.0);
            c(lo + (hi - lo) * t, y)
        })
        .collect()
}

pub fn realize(omega: &MatrixMeasure) -> Result<(Dilation, RealizationReport)> {
    let d = naimark_dilate(omega)?;
    let grid = verification_grid(omega);
    let mut max_residual = 0.0_f64;
    for &z in &grid {
        let direct = omega.transform(z, Kernel::Plain);
        let via = d.m_function(z);
        max_residual = max_residual.max(linalg::max_abs(&(via - &direct)) / linalg::max_abs(&direct).max(1.0));
    }
    let total_mass_residual = linalg::max_abs(&(d.k.adjoint() * &d.k - omega.total_mass()));
    Ok((d, RealizationReport { grid, max_residual, total_mass_residual }))
}

#[derive(Debug, Clone)]
pub struct PairRealization {
    pub first: PerturbationTriple,
    pub second: PerturbationTriple,
    pub residual_first: f64,
    pub residual_second: f64,
    pub total_mass_residual: f64,
}

/// Realizes `Ω₁` and `Ω₂` over a common `(H₀, K)` with couplings `L₁ = 0`
/// and `L₂ = Δ`. Requires `Ω₁(ℝ) = Ω₂(ℝ)`; the residuals report how well
/// the m-function of the second triple matches `Ω₂`.
pub fn realize_pair(omega1: &MatrixMeasure, omega2: &MatrixMeasure, delta: &CMat) -> Result<PairRealization> {
    linalg::require_hermitian(delta, "L2 - L1")?;
    let mass_gap = linalg::max_abs(&(omega1.total_mass() - omega2.total_mass()));
    let (d, rep) = realize(omega1)?;
    let first = d.as_triple()?;
    let second = first.with_l(delta.clone())?;
    let mut residual_second = 0.0_f64;
    for z in verification_grid(omega2) {
        let direct = omega2.transform(z, Kernel::Plain);
        residual_second = residual_second.max(linalg::max_abs(&(second.m_function(z)? - &direct)) / linalg::max_abs(&direct).max(1.0));
    }
    Ok(PairRealization { first, second, residual_first: rep.max_residual, residual_second, total_mass_residual: mass_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmath::I;
    use crate::testing;

    #[test]
    fn scalar_example() {
        let t = PerturbationTriple::new(linalg::scalar(c(0.0, 0.0)), linalg::scalar(c(1.0, 0.0)), linalg::scalar(c(0.0, 0.0))).unwrap();
        assert!((t.m_function(I).unwrap()[(0, 0)] - I).norm() < 1e-15);
        assert!(matches!(t.m_function(c(1.0, 1e-13)), Err(Error::NearSingularResolvent(_))));
    }

    #[test]
    fn spectral_measure_diag_example() {
        let t = PerturbationTriple::new(linalg::from_real_diag(&[1.0, 2.0]), linalg::identity(2), CMat::zeros(2, 2)).unwrap();
        let m = t.spectral_measure().unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert!((m.atoms()[0].x - 1.0).abs() < 1e-14);
        assert!((m.atoms()[0].weight[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(m.atoms()[0].weight[(1, 1)].norm() < 1e-14);
    }

    #[test]
    fn degenerate_eigenvalues_merge() {
        let t = PerturbationTriple::new(linalg::from_real_diag(&[1.0, 1.0, 3.0]), linalg::identity(3).columns(0, 2).into_owned(), CMat::zeros(2, 2)).unwrap();
        let m = t.spectral_measure().unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert!(linalg::max_abs(&(&m.atoms()[0].weight - linalg::identity(2))) < 1e-14);
    }

    #[test]
    fn decomposition_example() {
        let d = decompose_bounded(&linalg::from_real_diag(&[4.0, -9.0, 0.0])).unwrap();
        assert_eq!(d.rank, 2);
        assert!((d.k0[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!((d.k0[(1, 1)].re - 3.0).abs() < 1e-14);
        assert_eq!(d.l0, linalg::from_real_diag(&[1.0, -1.0]));
        let zero = decompose_bounded(&CMat::zeros(3, 3)).unwrap();
        assert_eq!(zero.rank, 0);
    }

    #[test]
    fn dilation_examples() {
        let single = MatrixMeasure::new(1, vec![MatrixAtom { x: 0.7, weight: linalg::scalar(c(4.0, 0.0)) }]).unwrap();
        let d = naimark_dilate(&single).unwrap();
        assert_eq!(d.eigenvalues, vec![0.7]);
        assert!((d.k[(0, 0)].re - 2.0).abs() < 1e-14);

        let two = MatrixMeasure::new(
            2,
            vec![MatrixAtom { x: 0.0, weight: linalg::identity(2) }, MatrixAtom { x: 1.0, weight: linalg::from_real_diag(&[1.0, 0.0]) }],
        )
        .unwrap();
        let d = naimark_dilate(&two).unwrap();
        assert_eq!(d.dimension(), 3);
        assert!(linalg::max_abs(&(d.atom_weight(1) - linalg::from_real_diag(&[1.0, 0.0]))) < 1e-14);
        let back = Dilation::from_json(&d.to_json()).unwrap();
        assert_eq!(back.atom_index.len(), 2);
        assert!(linalg::max_abs(&(back.k - &d.k)) == 0.0);

        let (_, rep) = realize(&MatrixMeasure::new(1, vec![MatrixAtom { x: 0.0, weight: linalg::identity(1) }]).unwrap()).unwrap();
        assert!(rep.max_residual < 1e-14);
    }

    #[test]
    fn zero_atom_does_not_grow_dilation() {
        let base = vec![MatrixAtom { x: 0.0, weight: linalg::identity(2) }];
        let mut with_zero = base.clone();
        with_zero.push(MatrixAtom { x: 5.0, weight: CMat::zeros(2, 2) });
        let a = naimark_dilate(&MatrixMeasure::new(2, base).unwrap()).unwrap();
        let b = naimark_dilate(&MatrixMeasure::new(2, with_zero).unwrap()).unwrap();
        assert_eq!(a.dimension(), b.dimension());
    }

    #[test]
    fn equal_couplings_have_zero_residual() {
        let mut rng = testing::rng(3);
        let t = testing::random_perturbation(&mut rng, 3, 2);
        let rep = lft_consistency(&t, &t, &[c(0.2, 1.0), c(-1.0, -0.5)]).unwrap();
        assert!(rep.max() < 1e-14);
    }

    #[test]
    fn reduced_model_matches() {
        // H0 = diag(1,1,2), K = e1: generated space has dimension 1
        let t = PerturbationTriple::new(
            linalg::from_real_diag(&[1.0, 1.0, 2.0]),
            CMat::from_column_slice(3, 1, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            linalg::scalar(c(0.5, 0.0)),
        )
        .unwrap();
        assert_eq!(t.generating_dimension().unwrap(), 1);
        let r = t.reduced().unwrap();
        assert_eq!(r.n(), 1);
        for z in [c(0.3, 0.4), c(2.0, -1.0)] {
            assert!(linalg::max_abs(&(r.m_function(z).unwrap() - t.m_function(z).unwrap())) < 1e-13);
        }
    }

    #[test]
    fn triple_json_roundtrip() {
        let mut rng = testing::rng(5);
        let t = testing::random_perturbation(&mut rng, 4, 2);
        assert_eq!(PerturbationTriple::from_json(&t.to_json()).unwrap(), t);
    }
}

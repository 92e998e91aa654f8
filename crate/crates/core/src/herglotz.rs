//! Herglotz functions: the integral representation, positivity checks,
//! J-unitary linear fractional maps, boundary inversion and continuation
//! across gaps of the spectrum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmath::{c, I};
use crate::error::{Error, Result};
use crate::io::{self, JsonMatrix};
use crate::linalg::{self, CMat};
use crate::measures::{Atom, ExtensionType, Kernel, MatrixMeasure, Measure, SampledDensity, Tail, SUPPORT_TOL};

/// Denominators of linear fractional maps with a larger condition number are
/// reported as singular.
pub const MAX_DENOMINATOR_CONDITION: f64 = 1e12;
pub const J_UNITARY_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum RepMeasure {
    Scalar(Measure),
    Matrix(MatrixMeasure),
}

/// `M(z) = C + D z + ∫ dΩ(λ) k(λ, z)` with `k` the full or plain kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzRep {
    constant: CMat,
    slope: CMat,
    measure: RepMeasure,
    kernel: Kernel,
}

impl HerglotzRep {
    pub fn scalar(constant: f64, slope: f64, measure: Measure, kernel: Kernel) -> Result<Self> {
        if !constant.is_finite() || !slope.is_finite() {
            return Err(Error::InvalidMatrix("non-finite constant or slope".into()));
        }
        if slope < 0.0 {
            return Err(Error::InvalidMatrix(format!("slope {slope} is negative")));
        }
        match kernel {
            Kernel::Plain if measure.has_infinite_mass() => {
                return Err(Error::DivergentIntegral("plain kernel requires a finite measure".into()));
            }
            Kernel::Full => {
                measure.weighted_mass(-1.0)?;
            }
            Kernel::Plain => {}
        }
        Ok(HerglotzRep {
            constant: linalg::scalar(c(constant, 0.0)),
            slope: linalg::scalar(c(slope, 0.0)),
            measure: RepMeasure::Scalar(measure),
            kernel,
        })
    }

    pub fn matrix(constant: CMat, slope: CMat, measure: MatrixMeasure, kernel: Kernel) -> Result<Self> {
        let k = measure.dimension();
        for (m, what) in [(&constant, "constant"), (&slope, "slope")] {
            if m.nrows() != k || m.ncols() != k {
                return Err(Error::InvalidMatrix(format!("{what} must be {k}x{k}")));
            }
            linalg::require_hermitian(m, what)?;
        }
        if !linalg::is_psd(&slope)? {
            return Err(Error::InvalidMatrix("slope is not positive semidefinite".into()));
        }
        Ok(HerglotzRep { constant: linalg::hermitize(&constant), slope: linalg::hermitize(&slope), measure: RepMeasure::Matrix(measure), kernel })
    }

    pub fn dimension(&self) -> usize {
        self.constant.nrows()
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn measure(&self) -> &RepMeasure {
        &self.measure
    }

    pub fn constant(&self) -> &CMat {
        &self.constant
    }

    pub fn slope(&self) -> &CMat {
        &self.slope
    }

    /// `M(z)` for `Im z ≠ 0`; lower half-plane values are obtained as
    /// `M(z̄)*`.
    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
            return Err(Error::EvalOnRealAxis(z));
        }
        if z.im < 0.0 {
            return Ok(self.eval_upper(z.conj())?.adjoint());
        }
        self.eval_upper(z)
    }

    fn eval_upper(&self, z: Complex64) -> Result<CMat> {
        let integral = match &self.measure {
            RepMeasure::Scalar(m) => linalg::scalar(m.transform(z, self.kernel)?),
            RepMeasure::Matrix(m) => m.transform(z, self.kernel),
        };
        Ok(&self.constant + self.slope.map(|d| d * z) + integral)
    }

    pub fn eval_scalar(&self, z: Complex64) -> Result<Complex64> {
        if self.dimension() != 1 {
            return Err(Error::InvalidMatrix("scalar evaluation of a matrix-valued function".into()));
        }
        Ok(self.eval(z)?[(0, 0)])
    }

    /// Real-axis value at a point at distance > 1e-8 from the support of a
    /// scalar representation.
    pub fn eval_real(&self, lambda: f64) -> Result<f64> {
        let RepMeasure::Scalar(m) = &self.measure else {
            return Err(Error::InvalidMatrix("real-axis evaluation is only provided for scalar functions".into()));
        };
        if m.distance_to_support(lambda) <= 1e-8 {
            return Err(Error::EvalOnRealAxis(c(lambda, 0.0)));
        }
        let v = m.transform(c(lambda, 0.0), self.kernel)?;
        Ok(self.constant[(0, 0)].re + self.slope[(0, 0)].re * lambda + v.re)
    }
}

// ---------------------------------------------------------------------------
// Positivity and the lower bound on Im M

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HerglotzReport {
    /// Smallest eigenvalue of `Im M(z)` over the samples.
    pub min_eigenvalue: f64,
    pub worst_z: Complex64,
    pub samples: usize,
    pub pass: bool,
}

/// Checks `Im M(z) ⪰ 0` on samples in the open upper half-plane.
pub fn verify_herglotz(f: &dyn Fn(Complex64) -> Result<CMat>, samples: &[Complex64]) -> Result<HerglotzReport> {
    let mut min = f64::INFINITY;
    let mut worst = c(0.0, 1.0);
    for &z in samples {
        if z.im <= 0.0 {
            return Err(Error::EvalOnRealAxis(z));
        }
        let m = f(z)?;
        let e = linalg::min_eig_imag_part(&m)?;
        if e < min {
            min = e;
            worst = z;
        }
    }
    Ok(HerglotzReport { min_eigenvalue: min, worst_z: worst, samples: samples.len(), pass: min >= -POSITIVITY_TOL })
}

pub fn verify_herglotz_scalar(f: &dyn Fn(Complex64) -> Result<Complex64>, samples: &[Complex64]) -> Result<HerglotzReport> {
    verify_herglotz(&|z| Ok(linalg::scalar(f(z)?)), samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundReport {
    /// `min (Im m(z)/Im z − 1/(max(1,|z|²)+|Re z|))` over all samples.
    pub quotient_margin: f64,
    /// `min (Im z · Im m(z) − 1/(max(1,|z|²)+|Re z|))` over samples with
    /// `Im z ≥ 1`.
    pub product_margin: f64,
    pub product_samples: usize,
    pub pass: bool,
}

pub fn lower_bound_denominator(z: Complex64) -> f64 {
    z.norm_sqr().max(1.0) + z.re.abs()
}

/// Lower bound on the imaginary part of a normalized scalar m-function
/// (`∫ dω/(1+λ²) = 1`): `Im m(z)/Im z ≥ 1/(max(1,|z|²)+|Re z|)` everywhere,
/// which implies the product form `Im z · Im m(z) ≥ …` when `Im z ≥ 1`.
pub fn verify_lower_bound(f: &dyn Fn(Complex64) -> Result<Complex64>, samples: &[Complex64], tol: f64) -> Result<LowerBoundReport> {
    let mut quotient = f64::INFINITY;
    let mut product = f64::INFINITY;
    let mut n_product = 0;
    for &z in samples {
        if z.im <= 0.0 {
            return Err(Error::EvalOnRealAxis(z));
        }
        let m = f(z)?;
        let bound = 1.0 / lower_bound_denominator(z);
        quotient = quotient.min(m.im / z.im - bound);
        if z.im >= 1.0 {
            n_product += 1;
            product = product.min(z.im * m.im - bound);
        }
    }
    Ok(LowerBoundReport {
        quotient_margin: quotient,
        product_margin: product,
        product_samples: n_product,
        pass: quotient >= -tol && (n_product == 0 || product >= -tol),
    })
}

// ---------------------------------------------------------------------------
// J-unitary linear fractional maps

/// Block matrix `A = [[A11, A12], [A21, A22]]` with `A* J A = J`,
/// `J = [[0, −I], [I, 0]]`, acting by `M ↦ (A21 + A22 M)(A11 + A12 M)⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct JUnitary {
    pub a11: CMat,
    pub a12: CMat,
    pub a21: CMat,
    pub a22: CMat,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JUnitaryJson {
    #[serde(rename = "A11")]
    a11: JsonMatrix,
    #[serde(rename = "A12")]
    a12: JsonMatrix,
    #[serde(rename = "A21")]
    a21: JsonMatrix,
    #[serde(rename = "A22")]
    a22: JsonMatrix,
}

fn j_matrix(k: usize) -> CMat {
    let mut j = CMat::zeros(2 * k, 2 * k);
    for i in 0..k {
        j[(i, k + i)] = c(-1.0, 0.0);
        j[(k + i, i)] = c(1.0, 0.0);
    }
    j
}

impl JUnitary {
    /// Validates the block shapes and the J-unitarity residual.
    pub fn new(a11: CMat, a12: CMat, a21: CMat, a22: CMat) -> Result<Self> {
        let k = a11.nrows();
        for m in [&a11, &a12, &a21, &a22] {
            if m.nrows() != k || m.ncols() != k {
                return Err(Error::InvalidMatrix("J-unitary blocks must all be k×k".into()));
            }
        }
        let a = JUnitary { a11, a12, a21, a22 };
        let r = a.residual();
        if r > J_UNITARY_TOL * a.scale() {
            return Err(Error::InvalidMatrix(format!("A*JA - J has size {r:e}")));
        }
        Ok(a)
    }

    fn scale(&self) -> f64 {
        linalg::max_abs(&self.full()).powi(2).max(1.0)
    }

    pub fn dimension(&self) -> usize {
        self.a11.nrows()
    }

    pub fn identity(k: usize) -> Self {
        JUnitary { a11: linalg::identity(k), a12: CMat::zeros(k, k), a21: CMat::zeros(k, k), a22: linalg::identity(k) }
    }

    /// `[[I, S], [0, I]]`, `S` Hermitian: `M ↦ M (I + S M)⁻¹`.
    pub fn upper(s: &CMat) -> Result<Self> {
        linalg::require_hermitian(s, "S")?;
        let k = s.nrows();
        Ok(JUnitary { a11: linalg::identity(k), a12: linalg::hermitize(s), a21: CMat::zeros(k, k), a22: linalg::identity(k) })
    }

    /// `[[I, 0], [S, I]]`, `S` Hermitian: `M ↦ S + M`.
    pub fn lower(s: &CMat) -> Result<Self> {
        linalg::require_hermitian(s, "S")?;
        let k = s.nrows();
        Ok(JUnitary { a11: linalg::identity(k), a12: CMat::zeros(k, k), a21: linalg::hermitize(s), a22: linalg::identity(k) })
    }

    /// `[[X, 0], [0, X^{-*}]]`: `M ↦ X^{-*} M X⁻¹`.
    pub fn congruence(x: &CMat) -> Result<Self> {
        let inv = linalg::inverse(x).ok_or_else(|| Error::InvalidMatrix("congruence factor is singular".into()))?;
        let k = x.nrows();
        Ok(JUnitary { a11: x.clone(), a12: CMat::zeros(k, k), a21: CMat::zeros(k, k), a22: inv.adjoint() })
    }

    /// `[[cos θ, sin θ], [−sin θ, cos θ]] ⊗ I_k`.
    pub fn rotation(k: usize, theta: f64) -> Self {
        let (s, co) = theta.sin_cos();
        let id = linalg::identity(k);
        JUnitary { a11: id.scale(co), a12: id.scale(s), a21: id.scale(-s), a22: id.scale(co) }
    }

    /// The map taking `M_{L1}` to `M_{L2}`: `[[I, L2 − L1], [0, I]]`.
    pub fn between_perturbations(l1: &CMat, l2: &CMat) -> Result<Self> {
        JUnitary::upper(&(l2 - l1))
    }

    pub fn full(&self) -> CMat {
        let k = self.dimension();
        let mut a = CMat::zeros(2 * k, 2 * k);
        a.view_mut((0, 0), (k, k)).copy_from(&self.a11);
        a.view_mut((0, k), (k, k)).copy_from(&self.a12);
        a.view_mut((k, 0), (k, k)).copy_from(&self.a21);
        a.view_mut((k, k), (k, k)).copy_from(&self.a22);
        a
    }

    fn from_full(a: &CMat) -> Self {
        let k = a.nrows() / 2;
        JUnitary {
            a11: a.view((0, 0), (k, k)).into_owned(),
            a12: a.view((0, k), (k, k)).into_owned(),
            a21: a.view((k, 0), (k, k)).into_owned(),
            a22: a.view((k, k), (k, k)).into_owned(),
        }
    }

    /// `‖A* J A − J‖_max`.
    pub fn residual(&self) -> f64 {
        let a = self.full();
        let j = j_matrix(self.dimension());
        linalg::max_abs(&(a.adjoint() * &j * &a - j))
    }

    /// Block product `self · other`; applying it equals applying `other`
    /// first, then `self`.
    pub fn compose(&self, other: &JUnitary) -> Result<JUnitary> {
        if self.dimension() != other.dimension() {
            return Err(Error::InvalidMatrix("J-unitary dimensions differ".into()));
        }
        Ok(JUnitary::from_full(&(self.full() * other.full())))
    }

    /// `(A21 + A22 M)(A11 + A12 M)⁻¹`; `z` is only used for error reports.
    pub fn apply(&self, m: &CMat, z: Complex64) -> Result<CMat> {
        let den = &self.a11 + &self.a12 * m;
        let num = &self.a21 + &self.a22 * m;
        let cond = linalg::condition_number(&den);
        if !(cond < MAX_DENOMINATOR_CONDITION) {
            return Err(Error::SingularDenominator { z, condition: cond });
        }
        // X den = num  ⇔  den^T X^T = num^T
        let xt = linalg::solve(&den.transpose(), &num.transpose()).ok_or(Error::SingularDenominator { z, condition: cond })?;
        Ok(xt.transpose())
    }

    pub fn apply_scalar(&self, m: Complex64, z: Complex64) -> Result<Complex64> {
        Ok(self.apply(&linalg::scalar(m), z)?[(0, 0)])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = JUnitaryJson {
            a11: io::matrix_to_json(&self.a11),
            a12: io::matrix_to_json(&self.a12),
            a21: io::matrix_to_json(&self.a21),
            a22: io::matrix_to_json(&self.a22),
        };
        serde_json::to_value(j).expect("J-unitary serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: JUnitaryJson = serde_json::from_value(v.clone())?;
        JUnitary::new(io::matrix_from_json(&j.a11)?, io::matrix_from_json(&j.a12)?, io::matrix_from_json(&j.a21)?, io::matrix_from_json(&j.a22)?)
    }
}

/// Applies `A` to the values of a matrix Herglotz function.
pub fn lft_apply<'a>(a: &'a JUnitary, f: &'a dyn Fn(Complex64) -> Result<CMat>) -> impl Fn(Complex64) -> Result<CMat> + 'a {
    move |z| a.apply(&f(z)?, z)
}

/// `(−sin θ + cos θ·m)/(cos θ + sin θ·m)`.
pub fn rotate_value(m: Complex64, theta: f64, z: Complex64) -> Result<Complex64> {
    let (s, co) = theta.sin_cos();
    let den = co + s * m;
    let scale = co.abs() + s.abs() * m.norm();
    if !(den.norm() > scale / MAX_DENOMINATOR_CONDITION) {
        return Err(Error::SingularDenominator { z, condition: scale / den.norm() });
    }
    Ok((-s + co * m) / den)
}

/// Rotation of a scalar evaluator through the angle `θ`.
pub fn extension_rotate<'a>(f: &'a dyn Fn(Complex64) -> Result<Complex64>, theta: f64) -> impl Fn(Complex64) -> Result<Complex64> + 'a {
    move |z| rotate_value(f(z)?, theta, z)
}

// ---------------------------------------------------------------------------
// Boundary inversion

pub const DEFAULT_EPS_LADDER: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
pub const ATOM_THRESHOLD: f64 = 1e-6;
pub const ATOM_DRIFT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub atoms: Vec<Atom>,
    pub grid: Vec<f64>,
    /// Extrapolated density; may dip slightly below zero from noise.
    pub density: Vec<f64>,
}

impl Inversion {
    /// Measure with the detected atoms and the density clipped at zero.
    pub fn to_measure(&self) -> Result<Measure> {
        let density = if self.grid.len() >= 2 {
            Some(SampledDensity { grid: self.grid.clone(), values: self.density.iter().map(|v| v.max(0.0)).collect() })
        } else {
            None
        };
        Measure::new(self.atoms.clone(), density, Tail::None)
    }
}

fn probe(f: &dyn Fn(Complex64) -> Result<Complex64>, lambda: f64, eps: f64) -> Result<f64> {
    let z = c(lambda, eps);
    let v = f(z)?;
    if v.im < -1e-8 {
        return Err(Error::NonHerglotzSample { z, im: v.im });
    }
    Ok(v.im)
}

/// Recovers the measure of `f` on `[a, b]` from `Im f(λ + iε)` along a
/// decreasing ladder of `ε`. Atoms are where `ε·Im f` is stable along the
/// ladder; their masses are extrapolated to `ε = 0`. The density on
/// `n_grid` points is `(1/π) Im f` with the atoms' Poisson kernels removed,
/// extrapolated by one Richardson step over the two smallest `ε`.
pub fn stieltjes_invert(f: &dyn Fn(Complex64) -> Result<Complex64>, a: f64, b: f64, eps_ladder: &[f64], n_grid: usize) -> Result<Inversion> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BadParameters(format!("inversion window [{a}, {b}] is empty")));
    }
    if eps_ladder.len() < 2 || eps_ladder.windows(2).any(|w| w[1] >= w[0]) || eps_ladder.iter().any(|&e| e < 1e-6) {
        return Err(Error::BadParameters("eps ladder must be strictly decreasing, length ≥ 2, entries ≥ 1e-6".into()));
    }
    let eps_max = eps_ladder[0];
    let eps_min = *eps_ladder.last().unwrap();

    // Scan at the coarsest ε for local maxima of ε·Im f.
    let h = eps_max / 4.0;
    let n_scan = (((b - a) / h).ceil() as usize).max(2);
    let scan: Vec<f64> = (0..=n_scan).map(|i| a + (b - a) * i as f64 / n_scan as f64).collect();
    let g: Vec<f64> = scan.iter().map(|&l| Ok(eps_max * probe(f, l, eps_max)?)).collect::<Result<_>>()?;
    let mut atoms = Vec::new();
    for i in 1..n_scan {
        if !(g[i] > g[i - 1] && g[i] >= g[i + 1]) || g[i] <= ATOM_THRESHOLD {
            continue;
        }
        let x = golden_max(&|l| probe(f, l, eps_min).map(|v| v * eps_min), scan[i - 1], scan[i + 1], 1e-12)?;
        let values: Vec<f64> = eps_ladder.iter().map(|&e| Ok(e * probe(f, x, e)?)).collect::<Result<_>>()?;
        if values.iter().any(|&v| v <= ATOM_THRESHOLD) {
            continue;
        }
        let drift = values.windows(2).map(|w| (w[0] - w[1]).abs() / w[1]).fold(0.0_f64, f64::max);
        if drift >= ATOM_DRIFT {
            continue;
        }
        let mass = extrapolate_to_zero(eps_ladder, &values);
        if mass > 0.0 && x >= a && x <= b {
            atoms.push(Atom { x, m: mass });
        }
    }

    let n = n_grid.max(2);
    let grid: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let e1 = eps_ladder[eps_ladder.len() - 2];
    let e2 = eps_min;
    let poisson = |l: f64, e: f64| atoms.iter().map(|at| at.m * e / ((l - at.x).powi(2) + e * e)).sum::<f64>();
    let mut density = Vec::with_capacity(n);
    for &l in &grid {
        let d1 = (probe(f, l, e1)? - poisson(l, e1)) / std::f64::consts::PI;
        let d2 = (probe(f, l, e2)? - poisson(l, e2)) / std::f64::consts::PI;
        // Linear-in-ε Richardson step for arbitrary ratio e1/e2.
        let r = e1 / e2;
        density.push((r * d2 - d1) / (r - 1.0));
    }
    Ok(Inversion { atoms, grid, density })
}

/// Polynomial extrapolation to `ε = 0` through the three smallest ladder
/// values (two when the ladder is short).
fn extrapolate_to_zero(eps: &[f64], values: &[f64]) -> f64 {
    let n = eps.len();
    let k = n.min(3);
    let xs = &eps[n - k..];
    let ys = &values[n - k..];
    // Lagrange interpolation evaluated at 0.
    let mut total = 0.0;
    for i in 0..k {
        let mut w = 1.0;
        for j in 0..k {
            if i != j {
                w *= xs[j] / (xs[j] - xs[i]);
            }
        }
        total += w * ys[i];
    }
    total
}

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol * (1.0 + lo.abs().max(hi.abs())) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Continuation below the real axis

type DensityFn = Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// An interval `(lo, hi)` on which the density of the measure extends to an
/// analytic function on the rectangle `lo < Re z < hi`, `−depth ≤ Im z ≤ 0`.
pub struct AnalyticInterval {
    lo: f64,
    hi: f64,
    depth: f64,
    density: DensityFn,
}

impl std::fmt::Debug for AnalyticInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticInterval").field("lo", &self.lo).field("hi", &self.hi).field("depth", &self.depth).finish()
    }
}

impl AnalyticInterval {
    pub fn new(lo: f64, hi: f64, depth: f64, density: DensityFn) -> Result<Self> {
        if !(lo < hi) || !(depth > 0.0) {
            return Err(Error::BadParameters(format!("empty validity rectangle ({lo}, {hi}) × [-{depth}, 0]")));
        }
        Ok(AnalyticInterval { lo, hi, depth, density })
    }

    /// A gap of the support: the density is identically zero there.
    pub fn gap(measure: &Measure, lo: f64, hi: f64, depth: f64) -> Result<Self> {
        let mid = 0.5 * (lo + hi);
        if measure.distance_to_support(mid) < 0.5 * (hi - lo) - 1e-12 {
            return Err(Error::BadParameters(format!("({lo}, {hi}) meets the support of the measure")));
        }
        AnalyticInterval::new(lo, hi, depth, Box::new(|_| c(0.0, 0.0)))
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.lo && z.re < self.hi && z.im <= 0.0 && z.im >= -self.depth
    }

    pub fn density_at(&self, z: Complex64) -> Complex64 {
        (self.density)(z)
    }

    /// Largest deviation between the extension on the real axis and the
    /// sampled density of `measure` at `n` interior points.
    pub fn real_axis_mismatch(&self, measure: &Measure, n: usize) -> f64 {
        (1..=n)
            .map(|i| {
                let l = self.lo + (self.hi - self.lo) * i as f64 / (n + 1) as f64;
                ((self.density)(c(l, 0.0)) - measure.density_at(l)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `M(z) = M(z̄)* + 2πi Ω'(z)` for `z` in the rectangle below the interval.
pub fn continue_below(rep: &HerglotzRep, interval: &AnalyticInterval, z: Complex64) -> Result<Complex64> {
    if !interval.contains(z) {
        return Err(Error::OutsideValidityRectangle(z));
    }
    if z.im == 0.0 {
        return Err(Error::EvalOnRealAxis(z));
    }
    let reflected = rep.eval_scalar(z.conj())?.conj();
    Ok(reflected + 2.0 * std::f64::consts::PI * I * interval.density_at(z))
}

// ---------------------------------------------------------------------------
// Classes of normalized functions with infinite total mass

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum N0Class {
    N0,
    N0F,
    N0K,
    N0FK,
    NotN0,
}

pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Membership from already established facts about a measure.
pub fn n0_from_facts(normalized: bool, infinite_mass: bool, support_min: Option<f64>, classify: impl FnOnce() -> Result<ExtensionType>) -> Result<N0Class> {
    if !normalized || !infinite_mass {
        return Ok(N0Class::NotN0);
    }
    if support_min.is_none_or(|s| s < -SUPPORT_TOL) {
        return Ok(N0Class::N0);
    }
    Ok(match classify()? {
        ExtensionType::Friedrichs => N0Class::N0F,
        ExtensionType::Krein => N0Class::N0K,
        ExtensionType::FriedrichsEqualsKrein => N0Class::N0FK,
        ExtensionType::Neither => N0Class::N0,
    })
}

pub fn n0_membership(m: &Measure) -> Result<N0Class> {
    let mass = m.weighted_mass(-1.0)?;
    n0_from_facts((mass - 1.0).abs() <= NORMALIZATION_TOL, m.has_infinite_mass(), m.support_min(), || m.classify_extension_type())
}

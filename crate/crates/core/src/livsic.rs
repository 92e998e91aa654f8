//! Closed-form models on the interval `[0, 2a]` and on the line: the
//! periodic-extension Donoghue m-function, its rotations, the associated
//! pure point measures and the spectra of the quasi-hermitian extensions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmath::{cot_stable, I};
use crate::error::{Error, Result};
use crate::herglotz::{n0_from_facts, rotate_value, N0Class};
use crate::measures::{ExtensionType, Measure};

type C = Complex64;

pub const DEFAULT_TRUNCATION: usize = 10_000;

/// `−cot(az)/coth(a)`.
pub fn periodic_donoghue_m(a: f64, z: C) -> Result<C> {
    if !(a > 0.0) {
        return Err(Error::BadParameters(format!("half-length a = {a} must be positive")));
    }
    if z.im == 0.0 {
        return Err(Error::EvalOnRealAxis(z));
    }
    Ok(-cot_stable(a * z) * a.tanh())
}

/// Interval model with half-length `a` and rotation angle `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct LivsicInterval {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterval {
    a: f64,
    alpha: f64,
}

impl TryFrom<RawInterval> for LivsicInterval {
    type Error = Error;
    fn try_from(r: RawInterval) -> Result<Self> {
        LivsicInterval::new(r.a, r.alpha)
    }
}

/// Relative residual allowed in the equation for `β`.
pub const BETA_TOL: f64 = 1e-12;

impl LivsicInterval {
    pub fn new(a: f64, alpha: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::BadParameters(format!("half-length a = {a} must be positive")));
        }
        if !(0.0..PI).contains(&alpha) {
            return Err(Error::BadParameters(format!("angle {alpha} outside [0, π)")));
        }
        let beta = solve_beta(a, alpha)?;
        Ok(LivsicInterval { a, alpha, beta })
    }

    /// `ρ = e^{2iβ}`.
    pub fn rho(&self) -> C {
        C::from_polar(1.0, 2.0 * self.beta)
    }

    /// `(sin α − cos α·t)/(cos α + sin α·t)` with `t = cot(az)/coth(a)`.
    pub fn m(&self, z: C) -> Result<C> {
        if z.im == 0.0 {
            return Err(Error::EvalOnRealAxis(z));
        }
        let t = cot_stable(self.a * z) * self.a.tanh();
        let (s, co) = self.alpha.sin_cos();
        let den = co + s * t;
        let scale = co.abs() + s.abs() * t.norm();
        if !(den.norm() > scale * 1e-14) {
            return Err(Error::SingularDenominator { z, condition: scale / den.norm() });
        }
        Ok((s - co * t) / den)
    }

    /// Mass of every atom: `coth a/(a(sin²α + cos²α coth²a))`.
    pub fn atom_mass(&self) -> f64 {
        let coth = 1.0 / self.a.tanh();
        let (s, co) = self.alpha.sin_cos();
        coth / (self.a * (s * s + co * co * coth * coth))
    }

    pub fn atom_location(&self, n: i64) -> f64 {
        self.beta / self.a + (PI / self.a) * n as f64
    }

    /// Residue of [`LivsicInterval::m`] at the `n`-th pole, by the
    /// derivative of the denominator.
    pub fn residue(&self, n: i64) -> f64 {
        let x = self.atom_location(n);
        let (s, co) = self.alpha.sin_cos();
        let w = self.a * x;
        let t = w.cos() / w.sin() * self.a.tanh();
        let num = s - co * t;
        let dt = -self.a * self.a.tanh() / (w.sin() * w.sin());
        num / (s * dt)
    }

    /// Normalization, infinite mass and unbounded support are properties of
    /// the full lattice.
    pub fn n0_class(&self) -> Result<N0Class> {
        let at_i = self.m(I)?;
        let normalized = (at_i - I).norm() <= 1e-10;
        n0_from_facts(normalized, true, None, || Ok(ExtensionType::Neither))
    }
}

/// `β ∈ [0, π)` with `cot β = −cot α coth a`, and `β = 0` for `α = 0`.
pub fn solve_beta(a: f64, alpha: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let target = -(alpha.cos() / alpha.sin()) / a.tanh();
    let beta = 1.0_f64.atan2(target);
    let residual = (beta.cos() / beta.sin() - target).abs() / target.abs().max(1.0);
    if residual > BETA_TOL {
        return Err(Error::NoConvergence(vec![residual]));
    }
    Ok(beta)
}

/// Angle with `livsic_m = rotate_value(periodic_donoghue_m, θ)`.
pub fn rotation_angle(model: &LivsicInterval) -> f64 {
    -model.alpha
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMeasure {
    pub measure: Measure,
    pub n: usize,
    /// Bound on the contribution of the omitted atoms to the Donoghue
    /// transform at `|z| ≤ 1`; scale by `max(1, |z|)` elsewhere.
    pub tail_bound: f64,
}

impl TruncatedMeasure {
    pub fn tail_bound_at(&self, z: C) -> f64 {
        self.tail_bound * z.norm().max(1.0)
    }
}

/// Atoms `(β + πn)/a` for `|n| ≤ N`, all with mass [`LivsicInterval::atom_mass`].
pub fn livsic_measure(model: &LivsicInterval, n: usize) -> Result<TruncatedMeasure> {
    if n == 0 {
        return Err(Error::BadParameters("truncation N must be at least 1".into()));
    }
    let mass = model.atom_mass();
    let n_i = n as i64;
    let atoms: Vec<(f64, f64)> = (-n_i..=n_i).map(|k| (model.atom_location(k), mass)).collect();
    let measure = Measure::atomic(&atoms)?;
    // |1/(λ−z) − λ/(1+λ²)| ≤ 2(|z|/λ² + 1/|λ|³) once |λ| ≥ 2|z| + 1, and
    // |λ_k| ≥ π(|k| − 1)/a.
    let a = model.a;
    let m = (n as f64 - 1.0).max(1.0);
    let tail_bound = 4.0 * mass * (a * a / (PI * PI * m) + a.powi(3) / (2.0 * PI.powi(3) * m * m));
    Ok(TruncatedMeasure { measure, n, tail_bound })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LebesgueLimitReport {
    pub a_ladder: Vec<f64>,
    /// `sup_z |m_a(z) − i|` per rung.
    pub distances: Vec<f64>,
    pub monotone: bool,
}

/// Distance of the interval models to the constant `i` along a ladder of
/// half-lengths.
pub fn lebesgue_limit_check(a_ladder: &[f64], alpha: f64, test_z: &[C]) -> Result<LebesgueLimitReport> {
    if a_ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadParameters("a ladder must be increasing".into()));
    }
    let mut distances = Vec::with_capacity(a_ladder.len());
    for &a in a_ladder {
        let model = LivsicInterval::new(a, alpha)?;
        let mut sup = 0.0_f64;
        for &z in test_z {
            sup = sup.max((model.m(z)? - I).norm());
        }
        distances.push(sup);
    }
    let monotone = distances.windows(2).all(|w| w[1] < w[0]);
    Ok(LebesgueLimitReport { a_ladder: a_ladder.to_vec(), distances, monotone })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SpectrumModel {
    /// `ρ` is given by modulus and argument; an infinite modulus encodes
    /// `ρ = ∞`.
    Interval { a: f64, rho_abs: f64, rho_arg: f64 },
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spectrum {
    /// `{offset + spacing·n : n ∈ ℤ}`.
    Lattice { offset: f64, spacing: f64 },
    Empty,
    ClosedUpperHalfPlane,
}

impl Spectrum {
    pub fn point(&self, n: i64) -> Option<f64> {
        match self {
            Spectrum::Lattice { offset, spacing } => Some(offset + spacing * n as f64),
            _ => None,
        }
    }

    pub fn contains(&self, z: C, tol: f64) -> bool {
        match *self {
            Spectrum::Empty => false,
            Spectrum::ClosedUpperHalfPlane => z.im >= -tol,
            Spectrum::Lattice { offset, spacing } => {
                if z.im.abs() > tol {
                    return false;
                }
                let k = ((z.re - offset) / spacing).round();
                (offset + spacing * k - z.re).abs() <= tol
            }
        }
    }
}

pub fn quasihermitian_spectrum(model: &SpectrumModel) -> Result<Spectrum> {
    match *model {
        SpectrumModel::Line => Ok(Spectrum::ClosedUpperHalfPlane),
        SpectrumModel::Interval { a, rho_abs, rho_arg } => {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidModel(format!("half-length a = {a} must be positive")));
            }
            if rho_abs == 0.0 || rho_abs == f64::INFINITY {
                return Ok(Spectrum::Empty);
            }
            if rho_abs != 1.0 || !rho_arg.is_finite() {
                return Err(Error::InvalidModel(format!("|ρ| = {rho_abs}: only ρ = 0, ρ = ∞ and |ρ| = 1 are supported")));
            }
            let half = rho_arg.rem_euclid(2.0 * PI) / 2.0;
            Ok(Spectrum::Lattice { offset: half / a, spacing: PI / a })
        }
    }
}

/// The interval spectrum model with `ρ = e^{2iβ}`, carrying `2β` as the
/// argument.
pub fn spectrum_model_of(model: &LivsicInterval) -> SpectrumModel {
    SpectrumModel::Interval { a: model.a, rho_abs: 1.0, rho_arg: 2.0 * model.beta }
}

/// Whether the atoms of a symmetric truncation coincide with the lattice
/// points of the spectrum for `ρ = e^{2iβ}`.
pub fn lattice_matches_support(model: &LivsicInterval, measure: &Measure) -> Result<bool> {
    let spec = quasihermitian_spectrum(&spectrum_model_of(model))?;
    let atoms = measure.atoms();
    let n = (atoms.len() / 2) as i64;
    Ok(atoms.len() % 2 == 1 && atoms.iter().zip(-n..=n).all(|(atom, k)| spec.point(k) == Some(atom.x)))
}

/// Constant `i`, the Donoghue m-function of `dλ/π`.
pub fn lebesgue_m(_z: C) -> C {
    I
}

pub fn periodic_rotated(a: f64, theta: f64, z: C) -> Result<C> {
    rotate_value(periodic_donoghue_m(a, z)?, theta, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmath::c;
    use crate::extensions::donoghue_m;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn periodic_examples() {
        assert!((periodic_donoghue_m(1.0, I).unwrap() - I).norm() < 1e-14);
        let far = periodic_donoghue_m(1.0, c(0.3, 50.0)).unwrap();
        assert!((far - I * 1f64.tanh()).norm() < 1e-14);
        let z = c(0.4, 0.7);
        let p = periodic_donoghue_m(2.0, z + PI / 2.0).unwrap();
        assert!((p - periodic_donoghue_m(2.0, z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn beta_equation() {
        let m = LivsicInterval::new(1.0, 0.0).unwrap();
        assert_eq!(m.beta, 0.0);
        for (a, alpha) in [(1.0, FRAC_PI_4), (0.3, 2.5), (4.0, 1e-3)] {
            let m = LivsicInterval::new(a, alpha).unwrap();
            assert!((0.0..PI).contains(&m.beta));
            let lhs = 1.0 / m.beta.tan();
            let rhs = -1.0 / alpha.tan() / a.tanh();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn rotated_is_rotation_of_periodic() {
        let m = LivsicInterval::new(1.3, 0.9).unwrap();
        for z in [c(0.2, 0.5), c(-3.0, 2.0), c(7.0, 0.01)] {
            let r = periodic_rotated(m.a, rotation_angle(&m), z).unwrap();
            assert!((r - m.m(z).unwrap()).norm() < 1e-12 * r.norm().max(1.0));
        }
        let m0 = LivsicInterval::new(1.3, 0.0).unwrap();
        assert!((m0.m(c(0.2, 0.5)).unwrap() - periodic_donoghue_m(1.3, c(0.2, 0.5)).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn normalized_at_i() {
        for a in [0.1, 1.0, 5.0] {
            for alpha in [0.0, 0.4, FRAC_PI_4, 2.0, 3.0] {
                let m = LivsicInterval::new(a, alpha).unwrap();
                assert!((m.m(I).unwrap() - I).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn masses_and_residues() {
        let m = LivsicInterval::new(1.0, PI / 2.0).unwrap();
        assert!((m.atom_mass() - 1.0 / 1f64.tanh()).abs() < 1e-14);
        let m = LivsicInterval::new(0.7, 1.1).unwrap();
        for n in -2..=2 {
            assert!((m.residue(n) + m.atom_mass()).abs() < 1e-10);
        }
        let m0 = LivsicInterval::new(2.0, 0.0).unwrap();
        assert!((m0.atom_mass() - 2f64.tanh() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn truncated_sum_matches_closed_form() {
        let m = LivsicInterval::new(1.0, FRAC_PI_4).unwrap();
        let t = livsic_measure(&m, DEFAULT_TRUNCATION).unwrap();
        let z = c(0.3, 0.7);
        let d = (donoghue_m(&t.measure, z).unwrap() - m.m(z).unwrap()).norm();
        assert!(d < 1e-4 && d <= t.tail_bound_at(z), "{d} vs {}", t.tail_bound_at(z));
        assert!(lattice_matches_support(&m, &t.measure).unwrap());
    }

    #[test]
    fn lebesgue_limit() {
        let zs = [c(0.0, 0.5), c(1.0, 1.0), c(-2.0, 0.3)];
        for alpha in [0.0, FRAC_PI_4, PI / 2.0] {
            let r = lebesgue_limit_check(&[0.5, 2.0, 10.0], alpha, &zs).unwrap();
            assert!(r.monotone, "{r:?}");
        }
    }

    #[test]
    fn spectra() {
        let s = quasihermitian_spectrum(&SpectrumModel::Interval { a: 1.0, rho_abs: 1.0, rho_arg: 0.0 }).unwrap();
        assert_eq!(s, Spectrum::Lattice { offset: 0.0, spacing: PI });
        assert_eq!(quasihermitian_spectrum(&SpectrumModel::Interval { a: 1.0, rho_abs: 0.0, rho_arg: 0.0 }).unwrap(), Spectrum::Empty);
        assert_eq!(quasihermitian_spectrum(&SpectrumModel::Line).unwrap(), Spectrum::ClosedUpperHalfPlane);
        assert!(matches!(quasihermitian_spectrum(&SpectrumModel::Interval { a: 1.0, rho_abs: 2.0, rho_arg: 0.0 }), Err(Error::InvalidModel(_))));
        assert_eq!(LivsicInterval::new(1.0, 0.5).unwrap().n0_class().unwrap(), N0Class::N0);
    }
}

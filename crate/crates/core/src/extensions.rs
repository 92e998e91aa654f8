//! Donoghue m-functions of self-adjoint extensions with deficiency indices
//! (1,1), the one-parameter family obtained by rotation, and identification
//! of the Friedrichs and Krein extensions from real-axis limits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmath::c;
use crate::error::{Error, Result};
use crate::herglotz::{rotate_value, NORMALIZATION_TOL};
use crate::measures::{linear_fit, ExtensionType, Kernel, Measure};
use crate::quadrature::{self, Tolerance};

/// `∫ dω(λ)((λ − z)⁻¹ − λ(1 + λ²)⁻¹)`.
pub fn donoghue_m(measure: &Measure, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::EvalOnRealAxis(z));
    }
    if z.im < 0.0 {
        return Ok(measure.transform(z.conj(), Kernel::Full)?.conj());
    }
    measure.transform(z, Kernel::Full)
}

/// Minimal distance from the support for real-axis evaluation.
pub const REAL_AXIS_GUARD: f64 = 1e-8;

pub fn donoghue_m_real(measure: &Measure, lambda: f64) -> Result<f64> {
    if measure.distance_to_support(lambda) <= REAL_AXIS_GUARD {
        return Err(Error::EvalOnRealAxis(c(lambda, 0.0)));
    }
    Ok(measure.transform(c(lambda, 0.0), Kernel::Full)?.re)
}

/// A normalized measure of infinite total mass labelling the extension `H_α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelJson", into = "ModelJson")]
pub struct DonoghueModel {
    measure: Measure,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    measure: Measure,
    alpha: f64,
}

impl TryFrom<ModelJson> for DonoghueModel {
    type Error = Error;
    fn try_from(j: ModelJson) -> Result<Self> {
        DonoghueModel::new(j.measure, j.alpha)
    }
}

impl From<DonoghueModel> for ModelJson {
    fn from(m: DonoghueModel) -> Self {
        ModelJson { measure: m.measure, alpha: m.alpha }
    }
}

impl DonoghueModel {
    pub fn new(measure: Measure, alpha: f64) -> Result<Self> {
        if !(0.0..std::f64::consts::PI).contains(&alpha) {
            return Err(Error::BadParameters(format!("angle {alpha} outside [0, π)")));
        }
        let mass = measure.weighted_mass(-1.0)?;
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidMeasure(format!("∫ dω/(1+λ²) = {mass}, expected 1")));
        }
        if !measure.has_infinite_mass() {
            return Err(Error::InvalidMeasure("a Donoghue model needs a tail of infinite total mass".into()));
        }
        Ok(DonoghueModel { measure, alpha })
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self, z: Complex64) -> Result<Complex64> {
        donoghue_m(&self.measure, z)
    }

    pub fn m_real(&self, lambda: f64) -> Result<f64> {
        donoghue_m_real(&self.measure, lambda)
    }
}

/// The family `m_β = (−sin(β−α) + cos(β−α) m_α)/(cos(β−α) + sin(β−α) m_α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionFamily {
    base: DonoghueModel,
}

impl ExtensionFamily {
    pub fn new(base: DonoghueModel) -> Self {
        ExtensionFamily { base }
    }

    pub fn base(&self) -> &DonoghueModel {
        &self.base
    }

    pub fn m(&self, beta: f64, z: Complex64) -> Result<Complex64> {
        rotate_family(self, beta, z)
    }
}

pub fn rotate_family(fam: &ExtensionFamily, beta: f64, z: Complex64) -> Result<Complex64> {
    rotate_value(fam.base.m(z)?, beta - fam.base.alpha, z)
}

/// `∫ dω (1+λ²)⁻²`, the exact supremum of `|ℓ(f)|²/(‖f‖² + ‖H_α f‖²)`.
pub fn functional_bound(measure: &Measure) -> Result<f64> {
    measure.weighted_mass(-2.0)
}

/// `∫ dω λ² |(λ−i)⁻¹ + e^{2iα}(λ+i)⁻¹|²` for a measure without tail. For
/// truncations of a measure with infinite mass it grows with the
/// truncation (except at α = π/2).
pub fn deficiency_pair_integral(measure: &Measure, alpha: f64) -> Result<f64> {
    if measure.tail() != crate::measures::Tail::None {
        return Err(Error::DivergentIntegral("deficiency pair integral of a measure with a tail".into()));
    }
    let e = Complex64::from_polar(1.0, 2.0 * alpha);
    let w = |l: f64| {
        let s = c(l, 1.0) + e * c(l, -1.0);
        l * l * s.norm_sqr() / (1.0 + l * l).powi(2)
    };
    let mut total: f64 = measure.atoms().iter().map(|a| a.m * w(a.x)).sum();
    if let Some(d) = measure.density() {
        let f = |l: f64| measure.density_at(l) * w(l);
        for seg in d.grid.windows(2) {
            total += quadrature::integrate(&f, seg[0], seg[1], Tolerance::default())?.0;
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Friedrichs / Krein identification from real-axis limits

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FkType {
    Friedrichs,
    Krein,
    Both,
    Neither,
}

impl From<ExtensionType> for FkType {
    fn from(t: ExtensionType) -> Self {
        match t {
            ExtensionType::Friedrichs => FkType::Friedrichs,
            ExtensionType::Krein => FkType::Krein,
            ExtensionType::FriedrichsEqualsKrein => FkType::Both,
            ExtensionType::Neither => FkType::Neither,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitVerdict {
    pub diverges: bool,
    /// Last ladder value (the approximate limit when convergent).
    pub last_value: f64,
    /// Slope of `ln|Δm|` per decade.
    pub slope: f64,
    pub r_squared: f64,
    pub rms_residual: f64,
}

impl LimitVerdict {
    fn confidence(&self) -> f64 {
        if self.r_squared >= MIN_R_SQUARED {
            self.r_squared
        } else {
            1.0 - self.rms_residual
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// `λ ↓ −∞`
    pub minus_infinity: LimitVerdict,
    /// `λ ↑ 0`
    pub zero_minus: LimitVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkVerdict {
    #[serde(rename = "type")]
    pub kind: FkType,
    pub limits: Limits,
    pub confidence: f64,
}

pub const LADDER_DECADES: i32 = 6;
pub const MIN_R_SQUARED: f64 = 0.99;
pub const DIVERGENT_SLOPE: f64 = -0.05;
/// Nearly constant increments (logarithmic growth) give a poor R² but a
/// small scatter about the fitted line.
pub const MAX_RMS_RESIDUAL: f64 = 0.05;

fn rms_residual(pts: &[(f64, f64)], slope: f64) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt()
}

/// Decides divergence of `m(λ_j)` along `λ_j = sign·10^{±j}`, `j = 1..=7`,
/// from a least-squares fit of `ln|m(λ_{j+1}) − m(λ_j)|` against `j`.
fn ladder_limit(m: &dyn Fn(f64) -> Result<f64>, towards_zero: bool) -> Result<LimitVerdict> {
    let pts: Vec<f64> = (1..=LADDER_DECADES + 1).map(|j| if towards_zero { -(10f64.powi(-j)) } else { -(10f64.powi(j)) }).collect();
    let vals: Vec<f64> = pts.iter().map(|&l| m(l)).collect::<Result<_>>()?;
    let incs: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = vals.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let significant: Vec<(f64, f64)> = incs.iter().enumerate().filter(|(_, d)| d.abs() > 1e-13 * scale).map(|(j, d)| (j as f64, d.abs().ln())).collect();
    let last_value = *vals.last().unwrap();
    if significant.len() < 3 {
        return Ok(LimitVerdict { diverges: false, last_value, slope: f64::NEG_INFINITY, r_squared: 1.0, rms_residual: 0.0 });
    }
    let (slope, r2) = linear_fit(&significant);
    let sign_consistent = incs.iter().all(|d| d.signum() == incs[0].signum());
    let rms = rms_residual(&significant, slope);
    if r2 < MIN_R_SQUARED && rms > MAX_RMS_RESIDUAL {
        return Err(Error::Inconclusive(format!("ladder fit R² = {r2:.4} below {MIN_R_SQUARED}, rms residual {rms:.3}")));
    }
    Ok(LimitVerdict { diverges: slope >= DIVERGENT_SLOPE && sign_consistent, last_value, slope, r_squared: r2, rms_residual: rms })
}

/// m-side verdict for a real-axis evaluator defined on `(−∞, 0)`.
pub fn classify_m_function(m: &dyn Fn(f64) -> Result<f64>) -> Result<FkVerdict> {
    let minus_infinity = ladder_limit(m, false)?;
    let zero_minus = ladder_limit(m, true)?;
    let kind = match (minus_infinity.diverges, zero_minus.diverges) {
        (true, true) => FkType::Both,
        (true, false) => FkType::Friedrichs,
        (false, true) => FkType::Krein,
        (false, false) => FkType::Neither,
    };
    let confidence = minus_infinity.confidence().min(zero_minus.confidence());
    Ok(FkVerdict { kind, limits: Limits { minus_infinity, zero_minus }, confidence })
}

/// m-side verdict for a model, required to agree with the measure-side
/// classification.
pub fn identify_friedrichs_krein(model: &DonoghueModel) -> Result<FkVerdict> {
    identify_for_measure(model.measure())
}

pub fn identify_for_measure(measure: &Measure) -> Result<FkVerdict> {
    let measure_side: FkType = measure.classify_extension_type()?.into();
    let verdict = classify_m_function(&|l| donoghue_m_real(measure, l))?;
    if verdict.kind != measure_side {
        return Err(Error::Inconclusive(format!("m-side verdict {:?} disagrees with measure-side verdict {measure_side:?}", verdict.kind)));
    }
    Ok(verdict)
}

/// Normalized measure with density `λ^{p0}` on `(0, 1]`, `λ^{p_inf}` on
/// `[1, ∞)`, sampled on a log grid from `1e-10` to `1e2`.
pub fn power_law_measure(p0: f64, p_inf: f64) -> Result<Measure> {
    let grid: Vec<f64> = (0..=120).map(|i| 10f64.powf(-10.0 + 0.1 * i as f64)).collect();
    let values: Vec<f64> = grid.iter().map(|&g| if g <= 1.0 { g.powf(p0) } else { g.powf(p_inf) }).collect();
    Measure::with_density(grid, values, crate::measures::Tail::Power(p_inf))?.donoghue_normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmath::{sqrt_upper, I};
    use crate::measures::Tail;
    use std::f64::consts::PI;

    #[test]
    fn lebesgue_model_is_constant_i() {
        let m = DonoghueModel::new(Measure::lebesgue_over_pi(), 0.0).unwrap();
        for z in [c(2.0, 3.0), I, c(-4.0, 0.01)] {
            assert!((m.m(z).unwrap() - I).norm() < 1e-14);
        }
        assert!((functional_bound(m.measure()).unwrap() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn model_requires_normalization_and_tail() {
        let unnormalized = Measure::lebesgue_over_pi().scaled(2.0);
        assert!(DonoghueModel::new(unnormalized, 0.0).is_err());
        let finite = Measure::atomic(&[(0.0, 1.0)]).unwrap();
        assert!(DonoghueModel::new(finite, 0.0).is_err());
        let json = r#"{"measure":{"tail":"lebesgue_over_pi"},"alpha":0.5}"#;
        let m: DonoghueModel = serde_json::from_str(json).unwrap();
        assert_eq!(m.alpha(), 0.5);
    }

    #[test]
    fn family_at_i_is_i() {
        let model = DonoghueModel::new(power_law_measure(0.5, 0.5).unwrap(), 0.3).unwrap();
        let fam = ExtensionFamily::new(model);
        for k in 0..8 {
            let beta = k as f64 * PI / 8.0;
            assert!((fam.m(beta, I).unwrap() - I).norm() < 1e-8);
        }
        let z = c(0.4, 0.2);
        assert!((fam.m(0.3, z).unwrap() - fam.base().m(z).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn closed_form_classifications() {
        let fried = |l: f64| Ok((I * sqrt_upper(c(2.0 * l, 0.0)) + 1.0).re);
        assert_eq!(classify_m_function(&fried).unwrap().kind, FkType::Friedrichs);
        let krein = |l: f64| Ok((I * 2f64.sqrt() / sqrt_upper(c(l, 0.0)) - 1.0).re);
        assert_eq!(classify_m_function(&krein).unwrap().kind, FkType::Krein);
        let both = |l: f64| Ok(-(2.0 / PI) * l.abs().ln());
        assert_eq!(classify_m_function(&both).unwrap().kind, FkType::Both);
    }

    #[test]
    fn power_law_families_agree() {
        let cases = [(0.5, 0.5, FkType::Friedrichs), (-0.5, -0.5, FkType::Krein), (0.0, 0.0, FkType::Both), (0.5, -0.5, FkType::Neither)];
        for (p0, pi, expect) in cases {
            let m = power_law_measure(p0, pi).unwrap();
            let v = identify_for_measure(&m).unwrap_or_else(|e| panic!("({p0}, {pi}): {e}"));
            assert_eq!(v.kind, expect, "({p0}, {pi})");
        }
    }

    #[test]
    fn deficiency_integral_grows_with_truncation() {
        let mut last = 0.0;
        for n in [10, 100, 1000] {
            let atoms: Vec<(f64, f64)> = (-n..=n).map(|k| (k as f64, 1.0)).collect();
            let m = Measure::atomic(&atoms).unwrap();
            let v = deficiency_pair_integral(&m, 0.3).unwrap();
            assert!(v > last);
            last = v;
        }
        let tail = Measure::with_density(vec![0.0, 1.0], vec![1.0, 1.0], Tail::Power(0.0)).unwrap();
        assert!(deficiency_pair_integral(&tail, 0.3).is_err());
    }
}

//! Scalar and matrix-valued spectral measures.
//!
//! A scalar [`Measure`] is a finite list of atoms, an optional density sampled
//! on a grid with piecewise-linear interpolation, and a symbolic [`Tail`]
//! describing the density outside the grid. Everything that numerics cannot
//! certify (divergence of `∫ dω/λ` near `0` or `∞`, infinite total mass) is
//! decided from the tail tag and from power-law fits of the sampled density
//! near its endpoints.
//!
//! Tail semantics:
//! * `none` — the density vanishes outside the grid.
//! * `lebesgue_over_pi` — without a grid, `dω = dλ/π` on all of ℝ; with a
//!   grid, the boundary values are continued as constants on both sides.
//! * `power(p)` — requires a grid ending at `λ_N > 0`; for `λ > λ_N` the
//!   density is `v_N (λ/λ_N)^p`. Only `p < 1` is admissible, since otherwise
//!   `∫ dω/(1+λ²)` diverges.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::beta;

use crate::cmath::ln_1p;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::quadrature::{self, Tolerance};

/// Atoms closer than this are merged.
pub const ATOM_MERGE_TOL: f64 = 1e-10;
/// Support points below `-SUPPORT_TOL` count as negative support.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub x: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledDensity {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    #[default]
    None,
    LebesgueOverPi,
    Power(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `(λ − z)^{-1} − λ(1 + λ²)^{-1}`
    Full,
    /// `(λ − z)^{-1}`
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionType {
    Friedrichs,
    Krein,
    FriedrichsEqualsKrein,
    Neither,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    density: Option<SampledDensity>,
    #[serde(default)]
    tail: Tail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct Measure {
    atoms: Vec<Atom>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<SampledDensity>,
    tail: Tail,
}

impl TryFrom<RawMeasure> for Measure {
    type Error = Error;
    fn try_from(raw: RawMeasure) -> Result<Self> {
        Measure::new(raw.atoms, raw.density, raw.tail)
    }
}

impl Measure {
    pub fn new(atoms: Vec<Atom>, density: Option<SampledDensity>, tail: Tail) -> Result<Self> {
        for a in &atoms {
            if !a.x.is_finite() || !a.m.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite atom {a:?}")));
            }
            if a.m < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative atom mass {} at {}", a.m, a.x)));
            }
        }
        if let Some(d) = &density {
            if d.grid.len() != d.values.len() {
                return Err(Error::InvalidMeasure("density grid and values differ in length".into()));
            }
            if d.grid.len() < 2 {
                return Err(Error::InvalidMeasure("density grid needs at least two nodes".into()));
            }
            if d.grid.iter().chain(&d.values).any(|v| !v.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite density sample".into()));
            }
            if d.grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidMeasure("density grid not strictly increasing".into()));
            }
            if let Some(v) = d.values.iter().find(|v| **v < 0.0) {
                return Err(Error::InvalidMeasure(format!("negative density value {v}")));
            }
        }
        if let Tail::Power(p) = tail {
            if !p.is_finite() || p >= 1.0 {
                return Err(Error::InvalidMeasure(format!("power tail exponent {p} must be finite and < 1")));
            }
            match &density {
                Some(d) if *d.grid.last().unwrap() > 0.0 => {}
                _ => return Err(Error::InvalidMeasure("power tail requires a density grid ending at a positive point".into())),
            }
        }
        let mut atoms: Vec<Atom> = atoms.into_iter().filter(|a| a.m > 0.0).collect();
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if (a.x - last.x).abs() <= ATOM_MERGE_TOL => {
                    let total = last.m + a.m;
                    last.x = (last.x * last.m + a.x * a.m) / total;
                    last.m = total;
                }
                _ => merged.push(a),
            }
        }
        Ok(Measure { atoms: merged, density, tail })
    }

    pub fn atomic(atoms: &[(f64, f64)]) -> Result<Self> {
        Measure::new(atoms.iter().map(|&(x, m)| Atom { x, m }).collect(), None, Tail::None)
    }

    /// `dω = dλ/π` on ℝ.
    pub fn lebesgue_over_pi() -> Self {
        Measure { atoms: Vec::new(), density: None, tail: Tail::LebesgueOverPi }
    }

    pub fn with_density(grid: Vec<f64>, values: Vec<f64>, tail: Tail) -> Result<Self> {
        Measure::new(Vec::new(), Some(SampledDensity { grid, values }), tail)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&SampledDensity> {
        self.density.as_ref()
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn is_purely_atomic(&self) -> bool {
        self.density.is_none() && self.tail == Tail::None
    }

    /// Density value at `λ`, tails included.
    pub fn density_at(&self, lambda: f64) -> f64 {
        match (&self.density, self.tail) {
            (None, Tail::LebesgueOverPi) => std::f64::consts::FRAC_1_PI,
            (None, _) => 0.0,
            (Some(d), tail) => {
                let (g, v) = (&d.grid, &d.values);
                let n = g.len();
                if lambda < g[0] {
                    return if tail == Tail::LebesgueOverPi { v[0] } else { 0.0 };
                }
                if lambda > g[n - 1] {
                    return match tail {
                        Tail::None => 0.0,
                        Tail::LebesgueOverPi => v[n - 1],
                        Tail::Power(p) => v[n - 1] * (lambda / g[n - 1]).powf(p),
                    };
                }
                let i = g.partition_point(|&x| x <= lambda).clamp(1, n - 1);
                let t = (lambda - g[i - 1]) / (g[i] - g[i - 1]);
                v[i - 1] + t * (v[i] - v[i - 1])
            }
        }
    }

    /// Whether `∫ dω = ∞`, decided from the tail tag.
    pub fn has_infinite_mass(&self) -> bool {
        match (&self.density, self.tail) {
            (_, Tail::None) => false,
            (None, Tail::LebesgueOverPi) => true,
            (Some(d), Tail::LebesgueOverPi) => d.values[0] > 0.0 || *d.values.last().unwrap() > 0.0,
            (Some(d), Tail::Power(p)) => p >= -1.0 && *d.values.last().unwrap() > 0.0,
            (None, Tail::Power(_)) => unreachable!("validated at construction"),
        }
    }

    /// Smallest point of the (closed) support, `-∞` when a tail extends left.
    pub fn support_min(&self) -> Option<f64> {
        let mut min = self.atoms.first().map(|a| a.x);
        let dens_min = match (&self.density, self.tail) {
            (None, Tail::LebesgueOverPi) => Some(f64::NEG_INFINITY),
            (None, _) => None,
            (Some(d), tail) => {
                if tail == Tail::LebesgueOverPi && d.values[0] > 0.0 {
                    Some(f64::NEG_INFINITY)
                } else if d.values[0] > 0.0 {
                    Some(d.grid[0])
                } else if let Some(i) = d.values.iter().position(|&v| v > 0.0) {
                    Some(d.grid[i - 1])
                } else if matches!(tail, Tail::Power(_) | Tail::LebesgueOverPi) && *d.values.last().unwrap() > 0.0 {
                    Some(*d.grid.last().unwrap())
                } else {
                    None
                }
            }
        };
        if let Some(dm) = dens_min {
            min = Some(min.map_or(dm, |m: f64| m.min(dm)));
        }
        min
    }

    /// Distance from `λ` to the support (0 when inside).
    pub fn distance_to_support(&self, lambda: f64) -> f64 {
        let mut best = f64::INFINITY;
        for a in &self.atoms {
            best = best.min((a.x - lambda).abs());
        }
        let (lo, hi) = match (&self.density, self.tail) {
            (None, Tail::LebesgueOverPi) => (f64::NEG_INFINITY, f64::INFINITY),
            (None, _) => return best,
            (Some(d), tail) => {
                let first = d.values.iter().position(|&v| v > 0.0);
                let last = d.values.iter().rposition(|&v| v > 0.0);
                let (mut lo, mut hi) = match (first, last) {
                    (Some(f), Some(l)) => (d.grid[f.saturating_sub(1)], d.grid[(l + 1).min(d.grid.len() - 1)]),
                    _ => (f64::INFINITY, f64::NEG_INFINITY),
                };
                if tail == Tail::LebesgueOverPi && d.values[0] > 0.0 {
                    lo = f64::NEG_INFINITY;
                }
                if tail != Tail::None && *d.values.last().unwrap() > 0.0 {
                    hi = f64::INFINITY;
                    lo = lo.min(*d.grid.last().unwrap());
                }
                (lo, hi)
            }
        };
        if lo <= hi {
            let d = if lambda < lo {
                lo - lambda
            } else if lambda > hi {
                lambda - hi
            } else {
                0.0
            };
            best = best.min(d);
        }
        best
    }

    /// Multiply the measure by `c > 0`.
    pub fn scaled(&self, c: f64) -> Measure {
        let atoms = self.atoms.iter().map(|a| Atom { x: a.x, m: a.m * c }).collect();
        let density = match (&self.density, self.tail) {
            (Some(d), _) => Some(SampledDensity { grid: d.grid.clone(), values: d.values.iter().map(|v| v * c).collect() }),
            (None, Tail::LebesgueOverPi) if c != 1.0 => {
                let v = c * std::f64::consts::FRAC_1_PI;
                Some(SampledDensity { grid: vec![-1.0, 1.0], values: vec![v, v] })
            }
            (None, _) => None,
        };
        Measure { atoms, density, tail: self.tail }
    }

    /// `∫ (1 + λ²)^exponent dω(λ)`.
    pub fn weighted_mass(&self, exponent: f64) -> Result<f64> {
        let mut total: f64 = self.atoms.iter().map(|a| a.m * (1.0 + a.x * a.x).powf(exponent)).sum();
        let weight = |x: f64| (1.0 + x * x).powf(exponent);
        match (&self.density, self.tail) {
            (None, Tail::LebesgueOverPi) => {
                total += 2.0 * std::f64::consts::FRAC_1_PI * power_weight_tail(0.0, exponent, 0.0)?;
            }
            (None, _) => {}
            (Some(d), tail) => {
                total += integrate_linear_segments(d, &weight)?;
                let n = d.grid.len();
                let (g0, v0) = (d.grid[0], d.values[0]);
                let (gn, vn) = (d.grid[n - 1], d.values[n - 1]);
                match tail {
                    Tail::None => {}
                    Tail::LebesgueOverPi => {
                        if v0 > 0.0 {
                            total += v0 * lebesgue_left(g0, exponent)?;
                        }
                        if vn > 0.0 {
                            total += vn * lebesgue_left(-gn, exponent)?;
                        }
                    }
                    Tail::Power(p) => {
                        if vn > 0.0 {
                            total += vn * gn.powf(-p) * power_weight_tail(p, exponent, gn)?;
                        }
                    }
                }
            }
        }
        Ok(total)
    }

    /// Rescale so that `∫ dω/(1+λ²) = 1`.
    pub fn donoghue_normalize(&self) -> Result<Measure> {
        let mass = self.weighted_mass(-1.0)?;
        if mass <= 0.0 {
            return Err(Error::ZeroMeasure);
        }
        Ok(self.scaled(1.0 / mass))
    }

    /// Cauchy-type transform `∫ dω(λ) k(λ, z)` for the chosen kernel. Valid
    /// off the real axis, and on the real axis at points off the support.
    pub fn transform(&self, z: Complex64, kernel: Kernel) -> Result<Complex64> {
        if kernel == Kernel::Plain && self.has_infinite_mass() {
            return Err(Error::DivergentIntegral("plain Cauchy kernel on a measure of infinite mass".into()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            acc += a.m * kernel_value(a.x, z, kernel);
        }
        let tol = Tolerance { rtol: 1e-12, atol: 1e-15 };
        match (&self.density, self.tail) {
            (None, Tail::LebesgueOverPi) => {
                // Plain kernel excluded above; the full kernel integrates to ±i.
                acc += if z.im > 0.0 {
                    Complex64::new(0.0, 1.0)
                } else if z.im < 0.0 {
                    Complex64::new(0.0, -1.0)
                } else {
                    return Err(Error::EvalOnRealAxis(z));
                };
            }
            (None, _) => {}
            (Some(d), tail) => {
                for i in 1..d.grid.len() {
                    acc += linear_segment_transform(d.grid[i - 1], d.grid[i], d.values[i - 1], d.values[i], z, kernel);
                }
                let n = d.grid.len();
                let (g0, v0) = (d.grid[0], d.values[0]);
                let (gn, vn) = (d.grid[n - 1], d.values[n - 1]);
                match tail {
                    Tail::None => {}
                    Tail::LebesgueOverPi => {
                        if v0 > 0.0 {
                            acc += v0 * constant_tail_transform(g0, z, kernel, true, tol)?;
                        }
                        if vn > 0.0 {
                            acc += vn * constant_tail_transform(gn, z, kernel, false, tol)?;
                        }
                    }
                    Tail::Power(p) => {
                        if vn > 0.0 {
                            let f = |mu: f64| kernel_value(mu, z, kernel) * (mu / gn).powf(p);
                            let p_eff = if kernel == Kernel::Full { p } else { p + 1.0 };
                            let (v, _) = quadrature::integrate_right_tail(&f, gn, p_eff, tol)?;
                            acc += vn * v;
                        }
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Friedrichs/Krein type of a measure supported in `[0, ∞)`, decided from
    /// the divergence of `∫_R^∞ dω/λ` (Friedrichs) and `∫_0^R dω/λ` (Krein).
    pub fn classify_extension_type(&self) -> Result<ExtensionType> {
        if let Some(min) = self.support_min() {
            if min < -SUPPORT_TOL {
                return Err(Error::UnsupportedMeasure(min));
            }
        }
        let at_infinity = self.diverges_at_infinity();
        let at_zero = self.diverges_at_zero()?;
        Ok(match (at_infinity, at_zero) {
            (true, true) => ExtensionType::FriedrichsEqualsKrein,
            (true, false) => ExtensionType::Friedrichs,
            (false, true) => ExtensionType::Krein,
            (false, false) => ExtensionType::Neither,
        })
    }

    fn diverges_at_infinity(&self) -> bool {
        match (&self.density, self.tail) {
            (_, Tail::None) => false,
            (None, Tail::LebesgueOverPi) => true,
            (Some(d), Tail::LebesgueOverPi) => *d.values.last().unwrap() > 0.0,
            (Some(d), Tail::Power(p)) => p >= 0.0 && *d.values.last().unwrap() > 0.0,
            (None, Tail::Power(_)) => unreachable!("validated at construction"),
        }
    }

    fn diverges_at_zero(&self) -> Result<bool> {
        if self.atoms.iter().any(|a| a.x.abs() <= SUPPORT_TOL) {
            return Ok(true);
        }
        let Some(d) = &self.density else {
            return Ok(matches!(self.tail, Tail::LebesgueOverPi));
        };
        let g0 = d.grid[0];
        if g0 > EDGE_REACH {
            return Ok(false);
        }
        if g0.abs() <= SUPPORT_TOL && d.values[0] > 0.0 {
            return Ok(true);
        }
        if g0 < -SUPPORT_TOL {
            // grid extends below zero with zero density; locate the first positive sample
            let first = d.values.iter().position(|&v| v > 0.0);
            return match first {
                None => Ok(false),
                Some(i) if d.grid[i - 1] > EDGE_REACH => Ok(false),
                Some(i) if d.grid[i - 1].abs() <= SUPPORT_TOL && d.grid[i] > 0.0 => {
                    // density rises linearly from zero at the origin
                    let fit = endpoint_power_fit(&d.grid[i..], &d.values[i..])?;
                    decide_zero_exponent(fit)
                }
                Some(_) => Ok(false),
            };
        }
        // Grid starts at (or just above) zero: fit the sampled power law.
        let start = if g0.abs() <= SUPPORT_TOL { 1 } else { 0 };
        let fit = endpoint_power_fit(&d.grid[start..], &d.values[start..])?;
        decide_zero_exponent(fit)
    }
}

/// Density grids starting above this point are treated as vanishing near 0.
pub const EDGE_REACH: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct PowerFit {
    pub exponent: f64,
    pub r_squared: f64,
    pub decades: f64,
}

/// Least-squares fit of `log v = p log λ + c` over the leading samples with
/// `λ ≤ 1e-2` (at least 4 points).
pub fn endpoint_power_fit(grid: &[f64], values: &[f64]) -> Result<PowerFit> {
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(values)
        .filter(|(g, v)| **g > 0.0 && **v > 0.0 && **g <= 1e-2)
        .map(|(g, v)| (g.ln(), v.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::Inconclusive("too few samples near the origin to fit an endpoint exponent".into()));
    }
    let (slope, r2) = linear_fit(&pts);
    let decades = (pts.last().unwrap().0 - pts[0].0) / std::f64::consts::LN_10;
    Ok(PowerFit { exponent: slope, r_squared: r2, decades })
}

fn decide_zero_exponent(fit: PowerFit) -> Result<bool> {
    if fit.r_squared < 0.99 || fit.decades < 2.0 {
        return Err(Error::Inconclusive(format!(
            "endpoint fit too weak (R² = {:.4}, {:.1} decades)",
            fit.r_squared, fit.decades
        )));
    }
    // ∫_0 λ^{p-1} dλ diverges iff p ≤ 0.
    if fit.exponent <= 0.02 {
        Ok(true)
    } else if fit.exponent >= 0.1 {
        Ok(false)
    } else {
        Err(Error::Inconclusive(format!("endpoint exponent {:.3} too close to the critical value 0", fit.exponent)))
    }
}

/// Slope and R² of an ordinary least-squares line.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    // A response flat to ~1e-3 is a perfect fit of slope ≈ 0.
    let r2 = if syy <= 1e-6 * n { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}

pub fn kernel_value(lambda: f64, z: Complex64, kernel: Kernel) -> Complex64 {
    let diff = Complex64::new(lambda, 0.0) - z;
    match kernel {
        Kernel::Plain => 1.0 / diff,
        // (1 + λz) / ((λ − z)(1 + λ²)), free of cancellation for large |λ|
        Kernel::Full => (1.0 + lambda * z) / diff / (1.0 + lambda * lambda),
    }
}

/// Exact transform of the linear density `v0 → v1` on `[l0, l1]`.
fn linear_segment_transform(l0: f64, l1: f64, v0: f64, v1: f64, z: Complex64, kernel: Kernel) -> Complex64 {
    if v0 == 0.0 && v1 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let h = l1 - l0;
    let b = (v1 - v0) / h;
    // L = ln((l1 − z)/(l0 − z))
    let log_ratio = ln_1p(Complex64::new(h, 0.0) / (Complex64::new(l0, 0.0) - z));
    let lead = Complex64::new(v0, 0.0) + b * (z - l0);
    match kernel {
        Kernel::Plain => lead * log_ratio + b * h,
        Kernel::Full => {
            // S = ½ ln((1+l1²)/(1+l0²)),  A = atan l1 − atan l0
            let s = 0.5 * (h * (l1 + l0) / (1.0 + l0 * l0)).ln_1p();
            let den = 1.0 + l0 * l1;
            let a = if den > 0.0 { (h / den).atan() } else { l1.atan() - l0.atan() };
            lead * log_ratio - (v0 - b * l0) * s + b * a
        }
    }
}

/// Transform of the unit constant density on `(-∞, t)` (`left`) or `(t, ∞)`.
fn constant_tail_transform(t: f64, z: Complex64, kernel: Kernel, left: bool, tol: Tolerance) -> Result<Complex64> {
    // Split at a point a unit away from the origin so the power substitution
    // sees a positive lower limit.
    let anchor = if left { (-t).max(1.0) } else { t.max(1.0) };
    let sign = if left { -1.0 } else { 1.0 };
    let f = |mu: f64| kernel_value(sign * mu, z, kernel);
    let (mut v, _) = quadrature::integrate_right_tail(&f, anchor, 0.0, tol)?;
    let inner_lo = if left { -anchor } else { t };
    let inner_hi = if left { t } else { anchor };
    if inner_hi > inner_lo {
        v += linear_segment_transform(inner_lo, inner_hi, 1.0, 1.0, z, kernel);
    }
    Ok(v)
}

/// `∫_T^∞ λ^p (1+λ²)^e dλ` for `T ≥ 0`.
fn power_weight_tail(p: f64, e: f64, t: f64) -> Result<f64> {
    let b = -e - 0.5 * p - 0.5;
    if b <= 0.0 {
        return Err(Error::DivergentIntegral(format!("∫^∞ λ^{p} (1+λ²)^{e} dλ")));
    }
    let a = 0.5 * (p + 1.0);
    if a > 0.0 {
        let x = 1.0 / (1.0 + t * t);
        let full = beta::beta(b, a);
        let reg = if x >= 1.0 { 1.0 } else { beta::beta_reg(b, a, x) };
        Ok(0.5 * full * reg)
    } else {
        if t <= 0.0 {
            return Err(Error::DivergentIntegral(format!("∫_0 λ^{p} dλ")));
        }
        let f = |mu: f64| mu.powf(p) * (1.0 + mu * mu).powf(e);
        let (v, _) = quadrature::integrate_right_tail(&f, t, p + 2.0 * e + 2.0, Tolerance { rtol: 1e-12, atol: 1e-16 })?;
        Ok(v)
    }
}

/// `∫_{-∞}^{t} (1+λ²)^e dλ`.
fn lebesgue_left(t: f64, e: f64) -> Result<f64> {
    if t <= 0.0 {
        power_weight_tail(0.0, e, -t)
    } else {
        Ok(2.0 * power_weight_tail(0.0, e, 0.0)? - power_weight_tail(0.0, e, t)?)
    }
}

/// `∫ f_lin(λ) w(λ) dλ` over all grid segments, `f_lin` the interpolated
/// density. Short segments use 8-point Gauss–Legendre, long ones adaptive
/// Simpson.
fn integrate_linear_segments(d: &SampledDensity, w: &dyn Fn(f64) -> f64) -> Result<f64> {
    let mut total = 0.0;
    for i in 1..d.grid.len() {
        let (l0, l1, v0, v1) = (d.grid[i - 1], d.grid[i], d.values[i - 1], d.values[i]);
        if v0 == 0.0 && v1 == 0.0 {
            continue;
        }
        let h = l1 - l0;
        let lin = |x: f64| v0 + (v1 - v0) * (x - l0) / h;
        let scale = 1.0_f64.max(l0.abs().min(l1.abs()));
        if h <= 0.25 * scale {
            total += gauss_legendre_8(&|x| lin(x) * w(x), l0, l1);
        } else {
            let (v, _) = quadrature::integrate(&|x: f64| lin(x) * w(x), l0, l1, Tolerance { rtol: 1e-12, atol: 1e-16 })?;
            total += v;
        }
    }
    Ok(total)
}

const GL8_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL8_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

fn gauss_legendre_8(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        s += w * (f(c - r * x) + f(c + r * x));
    }
    s * r
}

// ---------------------------------------------------------------------------
// Matrix measures

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixAtom {
    pub x: f64,
    pub weight: CMat,
}

/// Finitely supported measure with Hermitian PSD `k × k` weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMeasure {
    dimension: usize,
    atoms: Vec<MatrixAtom>,
}

impl MatrixMeasure {
    pub fn new(dimension: usize, atoms: Vec<MatrixAtom>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidMeasure("matrix measure dimension must be positive".into()));
        }
        for a in &atoms {
            if !a.x.is_finite() {
                return Err(Error::InvalidMeasure("non-finite atom location".into()));
            }
            if a.weight.nrows() != dimension || a.weight.ncols() != dimension {
                return Err(Error::InvalidMeasure(format!(
                    "weight at {} is {}x{}, expected {dimension}x{dimension}",
                    a.x,
                    a.weight.nrows(),
                    a.weight.ncols()
                )));
            }
            linalg::require_hermitian(&a.weight, "matrix weight")?;
            if !linalg::is_psd(&a.weight)? {
                let (vals, _) = linalg::eigh(&a.weight)?;
                return Err(Error::NotPsd(vals[0]));
            }
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<MatrixAtom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if (a.x - last.x).abs() <= ATOM_MERGE_TOL => {
                    last.weight += a.weight;
                }
                _ => merged.push(MatrixAtom { x: a.x, weight: linalg::hermitize(&a.weight) }),
            }
        }
        Ok(MatrixMeasure { dimension, atoms: merged })
    }

    /// Scalar measure viewed as a `1 × 1` matrix measure (atoms only).
    pub fn from_scalar(m: &Measure) -> Result<Self> {
        if !m.is_purely_atomic() {
            return Err(Error::InvalidMeasure("only purely atomic measures convert to matrix measures".into()));
        }
        let atoms = m.atoms().iter().map(|a| MatrixAtom { x: a.x, weight: linalg::scalar(Complex64::new(a.m, 0.0)) }).collect();
        MatrixMeasure::new(1, atoms)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[MatrixAtom] {
        &self.atoms
    }

    /// `Ω(ℝ)`.
    pub fn total_mass(&self) -> CMat {
        self.atoms.iter().fold(CMat::zeros(self.dimension, self.dimension), |acc, a| acc + &a.weight)
    }

    /// Scalar control measure `tr Ω`.
    pub fn trace_measure(&self) -> Result<Measure> {
        Measure::new(self.atoms.iter().map(|a| Atom { x: a.x, m: a.weight.trace().re.max(0.0) }).collect(), None, Tail::None)
    }

    pub fn transform(&self, z: Complex64, kernel: Kernel) -> CMat {
        self.atoms
            .iter()
            .fold(CMat::zeros(self.dimension, self.dimension), |acc, a| acc + a.weight.map(|w| w * kernel_value(a.x, z, kernel)))
    }
}

/// Weighted space `L²(Ω; w_r)` with `w_r(λ) = (1+λ²)^r`.
#[derive(Debug, Clone)]
pub struct WeightedL2Spec {
    pub base: MatrixMeasure,
    pub weight_exponent: f64,
}

impl WeightedL2Spec {
    pub fn new(base: MatrixMeasure, weight_exponent: f64) -> Result<Self> {
        if !weight_exponent.is_finite() {
            return Err(Error::InvalidMeasure("weight exponent must be finite".into()));
        }
        Ok(WeightedL2Spec { base, weight_exponent })
    }

    pub fn weight(&self, lambda: f64) -> f64 {
        (1.0 + lambda * lambda).powf(self.weight_exponent)
    }

    /// `∫ w_r dΩ`.
    pub fn weighted_total(&self) -> CMat {
        let k = self.base.dimension();
        self.base.atoms().iter().fold(CMat::zeros(k, k), |acc, a| acc + a.weight.scale(self.weight(a.x)))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixAtomJson {
    x: f64,
    w: crate::io::JsonMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixMeasureJson {
    dimension: usize,
    atoms: Vec<MatrixAtomJson>,
}

impl MatrixMeasure {
    pub fn to_json(&self) -> serde_json::Value {
        let j = MatrixMeasureJson {
            dimension: self.dimension,
            atoms: self.atoms.iter().map(|a| MatrixAtomJson { x: a.x, w: crate::io::matrix_to_json(&a.weight) }).collect(),
        };
        serde_json::to_value(j).expect("matrix measure serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: MatrixMeasureJson = serde_json::from_value(v.clone())?;
        let atoms = j
            .atoms
            .iter()
            .map(|a| Ok(MatrixAtom { x: a.x, weight: crate::io::matrix_from_json(&a.w)? }))
            .collect::<Result<Vec<_>>>()?;
        MatrixMeasure::new(j.dimension, atoms)
    }
}

//! Half-line Schrödinger operators `−ψ'' + qψ = zψ` on `[0, ∞)`: the
//! fundamental system, the Weyl–Titchmarsh m-function, its Donoghue
//! normalization, sharp point-evaluation bounds, and the point-interaction
//! closed forms.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmath::{c, sqrt_upper, I};
use crate::error::{Error, Result};
use crate::herglotz::rotate_value;
use crate::ode::{self, OdeOptions, OdeStats};
use crate::quadrature::{self, Tolerance};

type C = Complex64;

#[derive(Clone)]
enum PotentialKind {
    Zero,
    Table { grid: Vec<f64>, values: Vec<f64> },
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Real potential on `[0, ∞)`. Tables interpolate linearly and are held
/// constant beyond their last node.
#[derive(Clone)]
pub struct Potential {
    kind: PotentialKind,
    b_max: f64,
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            PotentialKind::Zero => write!(f, "Potential::Zero"),
            PotentialKind::Table { grid, .. } => write!(f, "Potential::Table({} nodes)", grid.len()),
            PotentialKind::Closure(_) => write!(f, "Potential::Closure(b_max = {})", self.b_max),
        }
    }
}

impl Potential {
    pub fn zero() -> Self {
        Potential { kind: PotentialKind::Zero, b_max: f64::INFINITY }
    }

    pub fn table(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.len() != values.len() {
            return Err(Error::InvalidPotential("table needs matching, non-empty x and q columns".into()));
        }
        if grid[0] != 0.0 {
            return Err(Error::InvalidPotential(format!("table must start at x = 0, starts at {}", grid[0])));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPotential("table grid not strictly increasing".into()));
        }
        if grid.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("non-finite table entry".into()));
        }
        Ok(Potential { kind: PotentialKind::Table { grid, values }, b_max: f64::INFINITY })
    }

    pub fn constant(q: f64) -> Result<Self> {
        Potential::table(vec![0.0], vec![q])
    }

    /// Potential given by a formula, declared integrable on `[0, b_max]`.
    pub fn closure(f: impl Fn(f64) -> f64 + Send + Sync + 'static, b_max: f64) -> Result<Self> {
        if !(b_max > 0.0) {
            return Err(Error::InvalidPotential("b_max must be positive".into()));
        }
        Ok(Potential { kind: PotentialKind::Closure(Arc::new(f)), b_max })
    }

    /// Two-column CSV `(x, q)`, header optional.
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::InvalidPotential(e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::InvalidPotential(format!("row {} has {} columns, expected 2", i + 1, rec.len())));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(q)) => {
                    grid.push(x);
                    values.push(q);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::InvalidPotential(format!("row {} is not numeric", i + 1))),
            }
        }
        Potential::table(grid, values)
    }

    pub fn b_max(&self) -> f64 {
        self.b_max
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Closure(f) => f(x),
            PotentialKind::Table { grid, values } => {
                let n = grid.len();
                if x >= grid[n - 1] {
                    return values[n - 1];
                }
                if x <= 0.0 {
                    return values[0];
                }
                let i = grid.partition_point(|&g| g <= x);
                let t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
                values[i - 1] + t * (values[i] - values[i - 1])
            }
        }
    }

    /// `(X, q_X)` when `q ≡ q_X` on `[X, ∞)`.
    pub fn constant_tail(&self) -> Option<(f64, f64)> {
        match &self.kind {
            PotentialKind::Zero => Some((0.0, 0.0)),
            PotentialKind::Table { grid, values } => Some((*grid.last().unwrap(), *values.last().unwrap())),
            PotentialKind::Closure(_) => None,
        }
    }

    fn breakpoints_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        if let PotentialKind::Table { grid, .. } = &self.kind {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let mut inner: Vec<f64> = grid.iter().copied().filter(|&g| g > lo && g < hi).collect();
            if a > b {
                inner.reverse();
            }
            pts.extend(inner);
        }
        pts.push(b);
        pts
    }
}

/// Boundary angle `γ ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryAngle(f64);

impl BoundaryAngle {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..std::f64::consts::PI).contains(&gamma) {
            return Err(Error::BadParameters(format!("boundary angle {gamma} outside [0, π)")));
        }
        Ok(BoundaryAngle(gamma))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `(φ(0), φ'(0), θ(0), θ'(0)) = (−sin γ, cos γ, cos γ, sin γ)`.
    pub fn initial_data(self) -> [C; 4] {
        let (s, co) = self.0.sin_cos();
        [c(-s, 0.0), c(co, 0.0), c(co, 0.0), c(s, 0.0)]
    }
}

/// Reduces an angle modulo π into `[0, π)`.
pub fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(std::f64::consts::PI);
    if r >= std::f64::consts::PI {
        0.0
    } else {
        r
    }
}

/// Integrates the state across the table breakpoints between `a` and `b`.
#[allow(clippy::too_many_arguments)]
fn integrate_segments<const N: usize>(
    q: &Potential,
    rhs: &dyn Fn(f64, &[C; N], f64) -> [C; N],
    a: f64,
    b: f64,
    y: [C; N],
    h: f64,
    groups: &[usize; N],
    opts: &OdeOptions,
    after_step: &mut dyn FnMut(f64, &mut [C; N]),
    stats: &mut OdeStats,
) -> Result<([C; N], f64)> {
    let pts = q.breakpoints_in(a, b);
    let mut y = y;
    let mut h = h;
    for seg in pts.windows(2) {
        let f = |x: f64, s: &[C; N]| rhs(x, s, q.value(x));
        let (y1, h1) = ode::integrate(&f, seg[0], seg[1], y, h, groups, opts, after_step, stats)?;
        y = y1;
        h = h1;
    }
    Ok((y, h))
}

/// `(φ, φ', θ, θ')` at `x`; real `z` is allowed.
pub fn fundamental_system(q: &Potential, gamma: BoundaryAngle, z: C, x: f64) -> Result<[C; 4]> {
    if !(0.0..=q.b_max()).contains(&x) {
        return Err(Error::BadParameters(format!("x = {x} outside [0, {}]", q.b_max())));
    }
    let rhs = |_x: f64, y: &[C; 4], qv: f64| {
        let k = c(qv, 0.0) - z;
        [y[1], k * y[0], y[3], k * y[2]]
    };
    let opts = OdeOptions { rtol: 1e-12, ..OdeOptions::default() };
    let mut stats = OdeStats::default();
    let (y, _) = integrate_segments(q, &rhs, 0.0, x, gamma.initial_data(), 1e-3, &[0, 1, 0, 1], &opts, &mut |_, _| {}, &mut stats)?;
    Ok(y)
}

/// `φθ' − φ'θ`, equal to `−1` for the normalized system.
pub fn wronskian(y: &[C; 4]) -> C {
    y[0] * y[3] - y[1] * y[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylResult {
    pub value: C,
    pub truncation_radius: f64,
    /// Error bar: the larger of the Weyl disk diameter at the final radius
    /// and the change from the previous radius.
    pub richardson_error: f64,
    pub disk_radius: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct WeylOptions {
    /// Accept when the error bar is below `tol · max(1, |m|)`.
    pub tol: f64,
    pub b0: f64,
    pub max_doublings: u32,
    pub ode_rtol: f64,
}

impl Default for WeylOptions {
    fn default() -> Self {
        WeylOptions { tol: 1e-9, b0: 20.0, max_doublings: 14, ode_rtol: 1e-11 }
    }
}

/// Renormalization threshold for growing solutions.
const RESCALE_AT: f64 = 1e100;

/// `m_γ(z) = lim_b −θ(z, b)/φ(z, b)` along `b = b0·2^k`. The Weyl disk at
/// radius `b` has radius `|W| / (2 Im z ∫_0^b |φ|²)` and contains the limit,
/// which bounds the truncation error.
pub fn weyl_m(q: &Potential, gamma: BoundaryAngle, z: C) -> Result<WeylResult> {
    weyl_m_with(q, gamma, z, &WeylOptions::default())
}

pub fn weyl_m_with(q: &Potential, gamma: BoundaryAngle, z: C, opts: &WeylOptions) -> Result<WeylResult> {
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::EvalOnRealAxis(z));
    }
    if z.im < 0.0 {
        let r = weyl_m_with(q, gamma, z.conj(), opts)?;
        return Ok(WeylResult { value: r.value.conj(), ..r });
    }
    let rhs = |_x: f64, y: &[C; 5], qv: f64| {
        let k = c(qv, 0.0) - z;
        [y[1], k * y[0], y[3], k * y[2], c(y[0].norm_sqr(), 0.0)]
    };
    let ode_opts = OdeOptions { rtol: opts.ode_rtol, ..OdeOptions::default() };
    let init = gamma.initial_data();
    let mut y = [init[0], init[1], init[2], init[3], c(0.0, 0.0)];
    let mut rescale = |_x: f64, y: &mut [C; 5]| {
        let mag = y[..4].iter().fold(0.0_f64, |a, v| a.max(v.norm()));
        if mag > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            for v in y[..4].iter_mut() {
                *v *= s;
            }
            y[4] *= s * s;
        }
    };
    let mut stats = OdeStats::default();
    let mut x = 0.0;
    let mut h = 1e-2;
    let mut b = opts.b0;
    let mut prev: Option<C> = None;
    let mut radii = Vec::new();
    for _ in 0..=opts.max_doublings {
        if b > q.b_max() {
            break;
        }
        let (y1, h1) = integrate_segments(q, &rhs, x, b, y, h, &[0, 1, 0, 1, 2], &ode_opts, &mut rescale, &mut stats)?;
        y = y1;
        h = h1;
        x = b;
        let m = -y[2] / y[0];
        let w = (y[0] * y[3] - y[1] * y[2]).norm();
        let r = w / (2.0 * z.im * y[4].re);
        radii.push(r);
        let scale = m.norm().max(1.0);
        if let Some(p) = prev {
            let err = (2.0 * r).max((m - p).norm());
            if err < opts.tol * scale && m.im > 0.0 {
                return Ok(WeylResult { value: m, truncation_radius: b, richardson_error: err, disk_radius: r });
            }
        }
        prev = Some(m);
        b *= 2.0;
    }
    Err(Error::NoConvergence(radii))
}

/// Weyl solution integrated backward from the start of a constant tail,
/// where it is `exp(i√(z − q_X)(x − X))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardWeyl {
    pub m: C,
    /// `‖θ + mφ‖²` over `[0, ∞)`.
    pub norm_sq: f64,
}

/// m-function and Weyl solution norm for potentials with a constant tail.
/// Also valid for real `z` below the tail constant.
pub fn weyl_backward(q: &Potential, gamma: BoundaryAngle, z: C) -> Result<BackwardWeyl> {
    let (x_tail, q_tail) = q.constant_tail().ok_or_else(|| Error::InvalidPotential("backward evaluation needs a potential constant past its last node".into()))?;
    if z.im < 0.0 {
        let r = weyl_backward(q, gamma, z.conj())?;
        return Ok(BackwardWeyl { m: r.m.conj(), ..r });
    }
    if z.im == 0.0 && z.re >= q_tail {
        return Err(Error::EvalOnRealAxis(z));
    }
    let k = sqrt_upper(z - q_tail);
    let rhs = |_x: f64, y: &[C; 3], qv: f64| {
        let kk = c(qv, 0.0) - z;
        // integrating towards 0, the norm accumulates with a minus sign
        [y[1], kk * y[0], c(-y[0].norm_sqr(), 0.0)]
    };
    let mut log_scale = 0.0_f64;
    let mut rescale = |_x: f64, y: &mut [C; 3]| {
        let mag = y[0].norm().max(y[1].norm());
        if mag > RESCALE_AT {
            y[0] /= RESCALE_AT;
            y[1] /= RESCALE_AT;
            y[2] /= RESCALE_AT * RESCALE_AT;
            log_scale += RESCALE_AT.ln();
        }
    };
    let mut stats = OdeStats::default();
    let opts = OdeOptions { rtol: 1e-12, ..OdeOptions::default() };
    let init = [c(1.0, 0.0), I * k, c(0.0, 0.0)];
    let (y, _) = integrate_segments(q, &rhs, x_tail, 0.0, init, 1e-3, &[0, 1, 2], &opts, &mut rescale, &mut stats)?;
    let (s, co) = gamma.value().sin_cos();
    let r0 = y[1] / y[0];
    let m = (r0 * co - s) / (co + r0 * s);
    // ψ_γ = θ + mφ has ψ_γ(0) = cos γ − m sin γ.
    let c0 = (co - m * s) / y[0];
    let tail = (-2.0 * log_scale).exp() / (2.0 * k.im);
    let norm_sq = c0.norm_sqr() * (y[2].re + tail);
    Ok(BackwardWeyl { m, norm_sq })
}

/// `m_γ(λ)` for real `λ` below the spectrum of a potential with constant
/// tail.
pub fn weyl_m_real(q: &Potential, gamma: BoundaryAngle, lambda: f64) -> Result<f64> {
    Ok(weyl_backward(q, gamma, c(lambda, 0.0))?.m.re)
}

/// Rotation of boundary angles: `m_δ` from `m_γ`.
pub fn rotate_boundary(m_gamma: C, gamma: f64, delta: f64, z: C) -> Result<C> {
    rotate_value(m_gamma, delta - gamma, z)
}

// ---------------------------------------------------------------------------
// Asymptotics

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub ys: Vec<f64>,
    /// `|m(iy) − cot γ|` for `γ ≠ 0`, `|m(iy) − i(iy)^{1/2}|` for `γ = 0`.
    pub residuals: Vec<f64>,
    /// Fitted decay exponent of the residual in `y` (`γ ≠ 0`).
    pub exponent: Option<f64>,
    pub pass: bool,
}

pub fn weyl_asymptotics_check(q: &Potential, gamma: BoundaryAngle) -> Result<AsymptoticsReport> {
    let ys = vec![1e2, 1e3, 1e4];
    let mut residuals = Vec::new();
    let mut errors = Vec::new();
    for &y in &ys {
        let z = c(0.0, y);
        let r = weyl_m(q, gamma, z)?;
        errors.push(r.richardson_error.max(1e-9 * r.value.norm()));
        let target = if gamma.value() == 0.0 { I * sqrt_upper(z) } else { c(1.0 / gamma.value().tan(), 0.0) };
        residuals.push((r.value - target).norm());
    }
    if gamma.value() == 0.0 {
        let noise = errors.iter().cloned().fold(0.0, f64::max);
        let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
        let at_noise = residuals.iter().all(|&r| r <= 10.0 * noise);
        return Ok(AsymptoticsReport { ys, residuals, exponent: None, pass: decreasing || at_noise });
    }
    let pts: Vec<(f64, f64)> = ys.iter().zip(&residuals).map(|(y, r)| (y.ln(), r.ln())).collect();
    let (slope, _) = crate::measures::linear_fit(&pts);
    Ok(AsymptoticsReport { ys, residuals, exponent: Some(slope), pass: (slope + 0.5).abs() <= 0.15 })
}

// ---------------------------------------------------------------------------
// Donoghue normalization

/// `m^D_α = (m_{γ(α)} − Re m_{γ(α)}(i)) / Im m_{γ(α)}(i)` with
/// `cot γ(α) = −Re m_0(i) − Im m_0(i) tan α`.
#[derive(Debug, Clone)]
pub struct WeylDonoghue {
    q: Potential,
    pub alpha: f64,
    pub gamma: f64,
    shift: f64,
    scale: f64,
}

pub fn gamma_of_alpha(m0_i: C, alpha: f64) -> f64 {
    if (alpha - std::f64::consts::FRAC_PI_2).abs() < 1e-15 {
        return 0.0;
    }
    let cot = -m0_i.re - m0_i.im * alpha.tan();
    reduce_angle(1.0_f64.atan2(cot))
}

impl WeylDonoghue {
    pub fn new(q: &Potential, alpha: f64) -> Result<Self> {
        if !(0.0..std::f64::consts::PI).contains(&alpha) {
            return Err(Error::BadParameters(format!("angle {alpha} outside [0, π)")));
        }
        let m0 = weyl_m(q, BoundaryAngle::new(0.0)?, I)?.value;
        let gamma = gamma_of_alpha(m0, alpha);
        let mg = weyl_m(q, BoundaryAngle::new(gamma)?, I)?.value;
        Ok(WeylDonoghue { q: q.clone(), alpha, gamma, shift: mg.re, scale: mg.im })
    }

    pub fn m(&self, z: C) -> Result<C> {
        let mg = weyl_m(&self.q, BoundaryAngle::new(self.gamma)?, z)?.value;
        Ok((mg - self.shift) / self.scale)
    }
}

pub fn weyl_to_donoghue(q: &Potential, alpha: f64, z: C) -> Result<C> {
    WeylDonoghue::new(q, alpha)?.m(z)
}

// ---------------------------------------------------------------------------
// Sharp bounds

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpBounds {
    /// `sup |f'(0)|²/(‖f‖² + ‖H_{π/2} f‖²) = Im m_0(i)`.
    pub sup_derivative: f64,
    /// `sup |f(0)|²/(‖f‖² + ‖H_α f‖²) = cos²α / Im m_0(i)`.
    pub sup_value: f64,
    pub product: f64,
    /// Best constant `C` in `|f'(0)| ≤ C (‖f‖² + ‖H_{π/2} f‖²)^{1/2}`.
    pub sobolev_constant: f64,
    /// Rayleigh quotient maximum over a finite trial space; a lower bound
    /// for `sup_derivative`.
    pub variational: Option<f64>,
}

pub fn sharp_bounds(q: &Potential, alpha: f64) -> Result<SharpBounds> {
    if !(0.0..std::f64::consts::PI).contains(&alpha) {
        return Err(Error::BadParameters(format!("angle {alpha} outside [0, π)")));
    }
    let m0 = weyl_m(q, BoundaryAngle::new(0.0)?, I)?.value;
    let sup_derivative = m0.im;
    let cos2 = alpha.cos().powi(2);
    let sup_value = cos2 / sup_derivative;
    Ok(SharpBounds { sup_derivative, sup_value, product: sup_derivative * sup_value, sobolev_constant: sup_derivative.sqrt(), variational: None })
}

/// `max ℓᵀG⁻¹ℓ` over `f = Σ c_j e^{−a_j x} sin(b_j x)`, where
/// `G = ⟨f_j, f_k⟩ + ⟨Hf_j, Hf_k⟩` and `ℓ_j = f_j'(0) = b_j`.
pub fn variational_derivative_bound(q: &Potential) -> Result<f64> {
    let params = [0.3, 0.6, 1.2, 2.4];
    let basis: Vec<(f64, f64)> = params.iter().flat_map(|&a| params.iter().map(move |&b| (a, b))).collect();
    let n = basis.len();
    let f = |(a, b): (f64, f64), x: f64| (-a * x).exp() * (b * x).sin();
    let hf = |(a, b): (f64, f64), x: f64| {
        let e = (-a * x).exp();
        let f2 = e * ((a * a - b * b) * (b * x).sin() - 2.0 * a * b * (b * x).cos());
        -f2 + q.value(x) * e * (b * x).sin()
    };
    let length = 40.0 / params[0];
    let tol = Tolerance { rtol: 1e-10, atol: 1e-12 };
    let mut g = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (bi, bj) = (basis[i], basis[j]);
            let integrand = |x: f64| f(bi, x) * f(bj, x) + hf(bi, x) * hf(bj, x);
            let (v, _) = quadrature::integrate(&integrand, 0.0, length, tol)?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let ell = DVector::from_iterator(n, basis.iter().map(|&(_, b)| b));
    let chol = g.cholesky().ok_or_else(|| Error::InvalidMatrix("trial Gram matrix is not positive definite".into()))?;
    let x = chol.solve(&ell);
    Ok(ell.dot(&x))
}

pub fn sharp_bounds_with_check(q: &Potential, alpha: f64) -> Result<SharpBounds> {
    let mut b = sharp_bounds(q, alpha)?;
    b.variational = Some(variational_derivative_bound(q)?);
    Ok(b)
}

// ---------------------------------------------------------------------------
// Point interactions

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Friedrichs,
    Krein,
}

fn point_interaction_upper(n: u32, which: Which, z: C) -> Result<C> {
    match (n, which) {
        (2, Which::Friedrichs) => Ok(-(2.0 / std::f64::consts::PI) * z.ln() + 2.0 * I),
        (3, Which::Friedrichs) => Ok(I * sqrt_upper(2.0 * z) + 1.0),
        (3, Which::Krein) => Ok(I * 2f64.sqrt() / sqrt_upper(z) - 1.0),
        (2, Which::Krein) => Err(Error::InvalidCombination("in dimension 2 the Friedrichs and Krein extensions coincide; use Friedrichs".into())),
        _ => Err(Error::InvalidCombination(format!("point interactions are provided for n = 2, 3, not {n}"))),
    }
}

/// Donoghue m-functions of the point interaction in `ℝⁿ`.
pub fn point_interaction_m(n: u32, which: Which, z: C) -> Result<C> {
    if z.im == 0.0 {
        return Err(Error::EvalOnRealAxis(z));
    }
    if z.im < 0.0 {
        return Ok(point_interaction_upper(n, which, z.conj())?.conj());
    }
    point_interaction_upper(n, which, z)
}

/// Real values on `(−∞, 0)`, where all three functions are real-analytic.
pub fn point_interaction_m_real(n: u32, which: Which, lambda: f64) -> Result<f64> {
    if lambda >= 0.0 {
        return Err(Error::EvalOnRealAxis(c(lambda, 0.0)));
    }
    let a = lambda.abs();
    match (n, which) {
        (2, Which::Friedrichs) => Ok(-(2.0 / std::f64::consts::PI) * a.ln()),
        (3, Which::Friedrichs) => Ok(1.0 - (2.0 * a).sqrt()),
        (3, Which::Krein) => Ok((2.0 / a).sqrt() - 1.0),
        _ => point_interaction_upper(n, which, c(lambda, 1.0)).map(|_| unreachable!()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn free_fundamental_system() {
        let g0 = BoundaryAngle::new(0.0).unwrap();
        let y = fundamental_system(&Potential::zero(), g0, c(0.0, 0.0), 2.5).unwrap();
        assert!((y[0] - c(2.5, 0.0)).norm() < 1e-10);
        assert!((y[1] - c(1.0, 0.0)).norm() < 1e-10);
        assert!((y[2] - c(1.0, 0.0)).norm() < 1e-10);
        assert!(y[3].norm() < 1e-10);
        let k = 1.7;
        let y = fundamental_system(&Potential::zero(), g0, c(k * k, 0.0), 3.0).unwrap();
        assert!((y[0].re - (k * 3.0).sin() / k).abs() < 1e-9);
        assert!((y[2].re - (k * 3.0).cos()).abs() < 1e-9);
    }

    #[test]
    fn wronskian_conserved_for_table() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let vals: Vec<f64> = grid.iter().map(|x| (x * 1.3).sin() * 2.0).collect();
        let q = Potential::table(grid, vals).unwrap();
        let y = fundamental_system(&q, BoundaryAngle::new(0.7).unwrap(), c(0.4, 0.3), 10.0).unwrap();
        let w = wronskian(&y);
        assert!((w + 1.0).norm() < 1e-9 * (1.0 + y[0].norm() * y[3].norm()), "{w}");
    }

    #[test]
    fn free_weyl_m_at_i() {
        let r = weyl_m(&Potential::zero(), BoundaryAngle::new(0.0).unwrap(), I).unwrap();
        assert!((r.value - c(-FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm() < 1e-8, "{:?}", r);
        let b = weyl_backward(&Potential::zero(), BoundaryAngle::new(0.0).unwrap(), I).unwrap();
        assert!((b.m - c(-FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn boundary_rotation() {
        let q = Potential::zero();
        let z = c(0.3, 0.8);
        let m0 = weyl_m(&q, BoundaryAngle::new(0.0).unwrap(), z).unwrap().value;
        let m3 = weyl_m(&q, BoundaryAngle::new(PI / 3.0).unwrap(), z).unwrap().value;
        assert!((rotate_boundary(m0, 0.0, PI / 3.0, z).unwrap() - m3).norm() < 1e-8);
    }

    #[test]
    fn norm_identity_backward() {
        let q = Potential::table(vec![0.0, 2.0, 5.0], vec![1.0, -0.5, 0.3]).unwrap();
        for g in [0.0, 0.8, 2.0] {
            let z = c(0.7, 0.4);
            let b = weyl_backward(&q, BoundaryAngle::new(g).unwrap(), z).unwrap();
            assert!((b.norm_sq - b.m.im / z.im).abs() < 1e-8 * b.norm_sq, "{g}: {b:?}");
        }
    }

    #[test]
    fn forward_and_backward_agree_for_table() {
        let q = Potential::table(vec![0.0, 1.0, 3.0], vec![2.0, -1.0, 0.5]).unwrap();
        let g = BoundaryAngle::new(1.1).unwrap();
        let z = c(-0.4, 0.9);
        let f = weyl_m(&q, g, z).unwrap();
        let b = weyl_backward(&q, g, z).unwrap();
        assert!((f.value - b.m).norm() < 1e-8, "{f:?} vs {b:?}");
    }

    #[test]
    fn donoghue_pipeline_free_case() {
        let d = WeylDonoghue::new(&Potential::zero(), PI / 2.0).unwrap();
        assert_eq!(d.gamma, 0.0);
        let z = c(0.5, 0.3);
        let expect = 2f64.sqrt() * I * sqrt_upper(z) + 1.0;
        assert!((d.m(z).unwrap() - expect).norm() < 1e-7);
        assert!((d.m(I).unwrap() - I).norm() < 1e-8);
    }

    #[test]
    fn sharp_bound_free_case() {
        let b = sharp_bounds_with_check(&Potential::zero(), PI / 6.0).unwrap();
        assert!((b.sup_derivative - FRAC_1_SQRT_2).abs() < 1e-7);
        assert!((b.sobolev_constant - 2f64.powf(-0.25)).abs() < 1e-7);
        assert!((b.product - 0.75).abs() < 1e-10);
        let v = b.variational.unwrap();
        assert!(v <= b.sup_derivative * (1.0 + 1e-9) && v >= 0.98 * b.sup_derivative, "{v}");
        let d = sharp_bounds(&Potential::zero(), PI / 2.0).unwrap();
        assert!(d.sup_value.abs() < 1e-30);
    }

    #[test]
    fn point_interactions_at_i() {
        for (n, w) in [(2, Which::Friedrichs), (3, Which::Friedrichs), (3, Which::Krein)] {
            assert!((point_interaction_m(n, w, I).unwrap() - I).norm() < 1e-14, "{n} {w:?}");
        }
        assert!(matches!(point_interaction_m(2, Which::Krein, I), Err(Error::InvalidCombination(_))));
        let z = c(-0.3, 0.2);
        let f = point_interaction_m(3, Which::Friedrichs, z).unwrap();
        let k = point_interaction_m(3, Which::Krein, z).unwrap();
        assert!((rotate_value(f, PI / 4.0 - PI / 2.0, z).unwrap() - k).norm() < 1e-12);
        for l in [-3.0, -0.01] {
            let up = point_interaction_m(3, Which::Krein, c(l, 1e-12)).unwrap().re;
            assert!((point_interaction_m_real(3, Which::Krein, l).unwrap() - up).abs() < 1e-5);
        }
    }

    #[test]
    fn potential_csv() {
        let q = Potential::from_csv("x,q\n0,1\n1,3\n".as_bytes()).unwrap();
        assert_eq!(q.value(0.5), 2.0);
        assert_eq!(q.value(7.0), 3.0);
        assert!(Potential::from_csv("0,1\n1\n".as_bytes()).is_err());
        assert!(Potential::from_csv("1,1\n2,3\n".as_bytes()).is_err());
    }

    #[test]
    fn krein_angle_for_shifted_free_operator() {
        let q = Potential::constant(1.0).unwrap();
        let m = weyl_m_real(&q, BoundaryAngle::new(0.0).unwrap(), -1e-12).unwrap();
        assert!((m + 1.0).abs() < 1e-9);
    }
}

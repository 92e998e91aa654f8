//! Adaptive Simpson quadrature for real and complex integrands, plus the
//! substitutions used for semi-infinite tails.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-14;
const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 16;
const MAX_EVALS: usize = 4_000_000;

pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rtol: DEFAULT_RTOL, atol: DEFAULT_ATOL }
    }
}

struct Simpson<'a, T> {
    f: &'a dyn Fn(f64) -> T,
    evals: usize,
    err: f64,
    stalled: bool,
}

impl<T: QuadValue> Simpson<'_, T> {
    fn eval(&mut self, x: f64) -> T {
        self.evals += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(&mut self, a: f64, b: f64, fa: T, fm: T, fb: T, whole: T, tol: f64, depth: u32) -> T {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let h = (b - a) / 12.0;
        let left = (fa + flm * 4.0 + fm) * h;
        let right = (fm + frm * 4.0 + fb) * h;
        let delta = left + right - whole;
        let est = delta.magnitude() / 15.0;
        if est <= tol || depth >= MAX_DEPTH || self.evals >= MAX_EVALS || (b - a).abs() <= 1e-14 * (a.abs() + b.abs()) {
            if est > tol {
                self.stalled = true;
            }
            self.err += est;
            return left + right + delta * (1.0 / 15.0);
        }
        self.recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
            + self.recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}

/// Integrate `f` over `[a, b]`. Returns the estimate and the accumulated
/// error estimate; fails with `QuadratureFailure` only if refinement stalls
/// with the error above tolerance.
pub fn integrate<T: QuadValue>(f: &dyn Fn(f64) -> T, a: f64, b: f64, tol: Tolerance) -> Result<(T, f64)> {
    if a == b {
        return Ok((T::zero(), 0.0));
    }
    let n = INITIAL_PANELS;
    let h = (b - a) / n as f64;
    let mut s = Simpson { f, evals: 0, err: 0.0, stalled: false };
    let xs: Vec<f64> = (0..=2 * n).map(|i| if i == 2 * n { b } else { a + 0.5 * h * i as f64 }).collect();
    let fs: Vec<T> = xs.iter().map(|&x| s.eval(x)).collect();
    let panels: Vec<T> = (0..n).map(|i| (fs[2 * i] + fs[2 * i + 1] * 4.0 + fs[2 * i + 2]) * (h / 6.0)).collect();
    let coarse = panels.iter().fold(T::zero(), |acc, &p| acc + p);
    let scale = panels.iter().map(|p| p.magnitude()).sum::<f64>().max(coarse.magnitude());
    let tol_abs = (tol.rtol * scale).max(tol.atol);
    let mut total = T::zero();
    for i in 0..n {
        total = total
            + s.recurse(xs[2 * i], xs[2 * i + 2], fs[2 * i], fs[2 * i + 1], fs[2 * i + 2], panels[i], tol_abs / n as f64, 0);
    }
    if s.stalled && s.err > tol_abs {
        let estimate = total.magnitude();
        return Err(Error::QuadratureFailure { estimate, error: s.err });
    }
    Ok((total, s.err))
}

/// `∫_T^∞ f(μ) dμ` for integrands decaying like `μ^{p-2}` with `p < 1`,
/// computed under the substitution `u = μ^{p-1}` which makes the leading
/// behaviour constant in `u`. Requires `T > 0`.
pub fn integrate_right_tail<T: QuadValue>(f: &dyn Fn(f64) -> T, t: f64, p: f64, tol: Tolerance) -> Result<(T, f64)> {
    debug_assert!(t > 0.0 && p < 1.0);
    let q = p - 1.0; // negative
    let u_max = t.powf(q);
    // Beyond this point the integrand is negligible; the cap keeps the
    // Jacobian μ^{1-q} finite.
    let mu_max = 1e100_f64.min(10f64.powf(250.0 / (1.0 - q)));
    let u_min = mu_max.powf(q);
    let g = move |u: f64| {
        let u = u.max(u_min);
        let mu = u.powf(1.0 / q);
        // |dμ/du| = μ / (|q| u)
        f(mu) * (mu / (-q * u))
    };
    integrate(&g, 0.0, u_max, tol)
}

/// `∫_{-∞}^{-T} f(μ) dμ` with the mirrored substitution.
pub fn integrate_left_tail<T: QuadValue>(f: &dyn Fn(f64) -> T, t: f64, p: f64, tol: Tolerance) -> Result<(T, f64)> {
    let g = |mu: f64| f(-mu);
    integrate_right_tail(&g, t, p, tol)
}

/// `∫_a^∞ f(λ) dλ` via `λ = tan θ`, for integrands bounded by a multiple of
/// `(1 + λ²)^{-1}`.
pub fn integrate_tan<T: QuadValue>(f: &dyn Fn(f64) -> T, a: f64, b: f64, tol: Tolerance) -> Result<(T, f64)> {
    let lo = if a == f64::NEG_INFINITY { -std::f64::consts::FRAC_PI_2 } else { a.atan() };
    let hi = if b == f64::INFINITY { std::f64::consts::FRAC_PI_2 } else { b.atan() };
    let g = |th: f64| {
        let th = th.clamp(-std::f64::consts::FRAC_PI_2 + 1e-12, std::f64::consts::FRAC_PI_2 - 1e-12);
        let x = th.tan();
        f(x) * (1.0 + x * x)
    };
    integrate(&g, lo, hi, tol)
}

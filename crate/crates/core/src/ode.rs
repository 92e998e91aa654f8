//! Embedded Dormand–Prince 5(4) integrator for small complex systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-300, h_min: 1e-13, max_steps: 20_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[C; N], terms: &[(f64, &[C; N])], h: f64) -> [C; N] {
    let mut out = *y;
    for (coef, k) in terms {
        if *coef == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += k[i] * (h * coef);
        }
    }
    out
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction). `groups`
/// assigns each component to an error group; the error of a component is
/// measured relative to the largest magnitude in its group, so components
/// passing through zero do not force tiny steps. `after_step` runs after
/// every accepted step and may rescale the state uniformly.
#[allow(clippy::too_many_arguments)]
pub fn integrate<const N: usize>(
    f: &dyn Fn(f64, &[C; N]) -> [C; N],
    x0: f64,
    x1: f64,
    y0: [C; N],
    h_init: f64,
    groups: &[usize; N],
    opts: &OdeOptions,
    after_step: &mut dyn FnMut(f64, &mut [C; N]),
    stats: &mut OdeStats,
) -> Result<([C; N], f64)> {
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    if span == 0.0 {
        return Ok((y0, h_init));
    }
    let mut x = x0;
    let mut y = y0;
    let mut h = h_init.abs().min(span).max(opts.h_min);
    let mut k1 = f(x, &y);
    let n_groups = groups.iter().copied().max().map_or(0, |g| g + 1);
    let mut steps = 0usize;
    loop {
        let remaining = (x1 - x) * dir;
        if remaining <= 1e-15 * span.max(x1.abs()) {
            break;
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;
        let k2 = f(x + C2 * hs, &axpy(&y, &[(A21, &k1)], hs));
        let k3 = f(x + C3 * hs, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
        let k4 = f(x + C4 * hs, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
        let k5 = f(x + C5 * hs, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs));
        let k6 = f(x + hs, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs));
        let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
        let k7 = f(x + hs, &y_new);
        let mut group_mag = [0.0_f64; 8];
        debug_assert!(n_groups <= group_mag.len());
        for i in 0..N {
            let g = groups[i];
            group_mag[g] = group_mag[g].max(y[i].norm()).max(y_new[i].norm());
        }
        let mut err = 0.0_f64;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            let scale = opts.atol + opts.rtol * group_mag[groups[i]];
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            err = 1e10;
        }
        if err <= 1.0 {
            x = if last { x1 } else { x + hs };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            let before = y;
            after_step(x, &mut y);
            if before != y {
                k1 = f(x, &y);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !last {
                h = (h * fac).max(opts.h_min);
            }
        } else {
            stats.rejected += 1;
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            h *= fac;
            if h < opts.h_min {
                return Err(Error::StepSizeUnderflow(x));
            }
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::StepSizeUnderflow(x));
        }
    }
    Ok((y, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_complex_frequency() {
        // y'' = -k² y with y(0)=0, y'(0)=1 → y = sin(kx)/k
        let k = C::new(1.3, 0.2);
        let f = move |_x: f64, y: &[C; 2]| [y[1], -k * k * y[0]];
        let mut stats = OdeStats::default();
        let (y, _) = integrate(
            &f,
            0.0,
            10.0,
            [C::new(0.0, 0.0), C::new(1.0, 0.0)],
            1e-3,
            &[0, 0],
            &OdeOptions::default(),
            &mut |_, _| {},
            &mut stats,
        )
        .unwrap();
        let exact = (k * 10.0).sin() / k;
        assert!((y[0] - exact).norm() < 1e-8 * exact.norm().max(1.0), "{} vs {}", y[0], exact);
    }

    #[test]
    fn backward_integration() {
        let f = |_x: f64, y: &[C; 1]| [y[0]];
        let mut stats = OdeStats::default();
        let (y, _) = integrate(&f, 1.0, 0.0, [C::new(1.0, 0.0)], 0.1, &[0], &OdeOptions::default(), &mut |_, _| {}, &mut stats).unwrap();
        assert!((y[0].re - (-1f64).exp()).abs() < 1e-10);
    }
}

//! Complex elementary functions with the branch conventions used throughout
//! the crate.

use num_complex::Complex64;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square root with `Im ≥ 0`. Maps the upper half-plane into the first
/// quadrant and the negative real axis onto the positive imaginary axis.
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    let w = z.sqrt();
    if w.im < 0.0 || (w.im == 0.0 && w.re < 0.0) {
        -w
    } else {
        w
    }
}

/// `cot(w)`, saturating to `∓i` when `|Im w| > 20` so that large imaginary
/// arguments do not overflow `cos`/`sin`.
pub fn cot_stable(w: Complex64) -> Complex64 {
    if w.im > 20.0 {
        -I
    } else if w.im < -20.0 {
        I
    } else {
        w.cos() / w.sin()
    }
}

/// `ln(1 + w)` accurate for small `|w|`.
pub fn ln_1p(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        // w - w²/2 + w³/3 - w⁴/4
        let w2 = w * w;
        w - w2 * 0.5 + w2 * w / 3.0 - w2 * w2 * 0.25
    } else {
        (Complex64::new(1.0, 0.0) + w).ln()
    }
}

/// Largest absolute difference between two complex numbers, scaled by
/// `max(1, |b|)`.
pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_branch_lands_in_upper_half_plane() {
        for &(re, im) in &[(1.0, 0.0), (-1.0, 0.0), (-1.0, -0.0), (0.3, -2.0), (-4.0, 1e-300)] {
            let w = sqrt_upper(c(re, im));
            assert!(w.im >= 0.0, "{re} {im} -> {w}");
            assert!((w * w - c(re, im)).norm() < 1e-14 * (1.0 + c(re, im).norm()));
        }
        assert!((sqrt_upper(c(-4.0, 0.0)) - c(0.0, 2.0)).norm() < 1e-15);
        // e^{3iπ/4} = i·i^{1/2}
        let v = I * sqrt_upper(I);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v - c(-s, s)).norm() < 1e-15);
    }

    #[test]
    fn cot_saturates() {
        assert_eq!(cot_stable(c(0.3, 25.0)), -I);
        assert_eq!(cot_stable(c(0.3, -25.0)), I);
        let w = c(0.4, 19.0);
        assert!((cot_stable(w) + I).norm() < 1e-15);
        // cot(i) = -i coth(1)
        let v = cot_stable(I);
        assert!((v - c(0.0, -1.0 / 1f64.tanh())).norm() < 1e-15);
    }

    #[test]
    fn ln_1p_matches_ln_for_moderate_arguments() {
        for &w in &[c(1e-5, 2e-5), c(0.3, -0.2), c(-1e-6, 0.0)] {
            let expect = (c(1.0, 0.0) + w).ln();
            assert!((ln_1p(w) - expect).norm() <= 1e-15 * (1.0 + expect.norm()) + 1e-20);
        }
    }
}

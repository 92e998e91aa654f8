//! Seeded random instances for property checks and verification suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cmath::c;
use crate::herglotz::JUnitary;
use crate::linalg::{self, CMat};
use crate::measures::{MatrixAtom, MatrixMeasure, Measure};
use crate::perturbation::PerturbationTriple;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut TestRng) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut TestRng, n: usize, k: usize) -> CMat {
    CMat::from_fn(n, k, |_, _| random_complex(rng))
}

pub fn random_hermitian(rng: &mut TestRng, n: usize) -> CMat {
    linalg::hermitize(&random_matrix(rng, n, n))
}

pub fn random_perturbation(rng: &mut TestRng, n: usize, k: usize) -> PerturbationTriple {
    let h0 = random_hermitian(rng, n).scale(2.0);
    let k_mat = random_matrix(rng, n, k);
    let l = random_hermitian(rng, k);
    PerturbationTriple::new(h0, k_mat, l).expect("random triple is valid")
}

/// `n_atoms` locations in `[lo, hi]` at mutual distance at least `min_sep`.
pub fn separated_points(rng: &mut TestRng, n_atoms: usize, lo: f64, hi: f64, min_sep: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = Vec::with_capacity(n_atoms);
    let mut attempts = 0;
    while xs.len() < n_atoms {
        attempts += 1;
        assert!(attempts < 100_000, "cannot place {n_atoms} points in [{lo}, {hi}] with separation {min_sep}");
        let x = rng.random_range(lo..hi);
        if xs.iter().all(|y| (x - y).abs() >= min_sep) {
            xs.push(x);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs
}

/// Atomic measure with masses in `[0.2, 2]`.
pub fn random_atomic_measure(rng: &mut TestRng, n_atoms: usize, lo: f64, hi: f64, min_sep: f64) -> Measure {
    let atoms: Vec<(f64, f64)> = separated_points(rng, n_atoms, lo, hi, min_sep).into_iter().map(|x| (x, rng.random_range(0.2..2.0))).collect();
    Measure::atomic(&atoms).expect("random measure is valid")
}

/// PSD weight of random rank in `1..=k`.
pub fn random_psd(rng: &mut TestRng, k: usize) -> CMat {
    let r = rng.random_range(1..=k);
    let f = random_matrix(rng, r, k);
    linalg::hermitize(&(f.adjoint() * f))
}

pub fn random_matrix_measure(rng: &mut TestRng, k: usize, n_atoms: usize) -> MatrixMeasure {
    let xs = separated_points(rng, n_atoms, -3.0, 3.0, 0.05);
    let atoms = xs.into_iter().map(|x| MatrixAtom { x, weight: random_psd(rng, k) }).collect();
    MatrixMeasure::new(k, atoms).expect("random matrix measure is valid")
}

/// Product of the elementary J-unitary generators with random parameters.
pub fn random_j_unitary(rng: &mut TestRng, k: usize) -> JUnitary {
    let s1 = random_hermitian(rng, k);
    let s2 = random_hermitian(rng, k);
    let x = &random_matrix(rng, k, k).scale(0.3) + linalg::identity(k);
    let theta = rng.random_range(0.0..std::f64::consts::PI);
    let parts = [
        JUnitary::upper(&s1).expect("hermitian"),
        JUnitary::lower(&s2).expect("hermitian"),
        JUnitary::congruence(&x).expect("invertible"),
        JUnitary::rotation(k, theta),
    ];
    parts.iter().skip(1).fold(parts[0].clone(), |acc, p| acc.compose(p).expect("same dimension"))
}

/// Points with real part in `[re_lo, re_hi]` and log-uniform imaginary part
/// in `[im_lo, im_hi]`.
pub fn upper_half_plane(rng: &mut TestRng, n: usize, re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let y = (rng.random_range(im_lo.ln()..im_hi.ln())).exp();
            c(rng.random_range(re_lo..re_hi), y)
        })
        .collect()
}

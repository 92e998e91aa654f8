//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line to stdout
//! (bypassing output capture) and then asserts.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write;
use std::time::Instant;

use nevanlinna::cmath::{c, sqrt_upper, I};
use nevanlinna::extensions::{classify_m_function, donoghue_m, donoghue_m_real, power_law_measure, FkType};
use nevanlinna::herglotz::{rotate_value, stieltjes_invert, verify_herglotz_scalar, verify_lower_bound, DEFAULT_EPS_LADDER};
use nevanlinna::livsic::{livsic_measure, lattice_matches_support, LivsicInterval, DEFAULT_TRUNCATION};
use nevanlinna::measures::Kernel;
use nevanlinna::perturbation::{lft_consistency, realize, spectral_measure_of};
use nevanlinna::registry::Registry;
use nevanlinna::schrodinger::{point_interaction_m_real, rotate_boundary, sharp_bounds, sharp_bounds_with_check, weyl_m, BoundaryAngle, Potential, WeylDonoghue, Which};
use nevanlinna::testing;
use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

const WEYL_TOL: f64 = 1e-7;
const WEYL_BUDGET_SECS: f64 = 10.0;
const SHARP_TOL: f64 = 1e-7;
const VARIATIONAL_FRACTION: f64 = 0.98;
const PRODUCT_TOL: f64 = 1e-10;
const NORMALIZATION_TOL: f64 = 1e-8;
const LFT_TOL: f64 = 1e-10;
const LOCATION_TOL: f64 = 1e-10;
const WEIGHT_TOL: f64 = 1e-9;
const MASS_TOL: f64 = 1e-10;
const LIVSIC_SUM_TOL: f64 = 1e-4;
const RESIDUE_TOL: f64 = 1e-10;
const ROTATION_TOL: f64 = 1e-8;
const GROUP_LAW_TOL: f64 = 1e-9;
const HERGLOTZ_TOL: f64 = 1e-8;
const DENSITY_TOL: f64 = 1e-3;
const ATOM_MASS_TOL: f64 = 1e-3;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{status} criterion {id:>2} {name}: {detail}").unwrap();
}

fn angles() -> [f64; 4] {
    [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4]
}

#[test]
fn criterion_01_free_weyl() {
    let start = Instant::now();
    let q = Potential::zero();
    let g0 = BoundaryAngle::new(0.0).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..20 {
        let r = 10f64.powf(-1.0 + 3.0 * i as f64 / 19.0);
        let arg = 0.15 + (PI - 0.3) * ((i * 7) % 20) as f64 / 19.0;
        let z = Complex64::from_polar(r, arg);
        let m = weyl_m(&q, g0, z).unwrap().value;
        worst = worst.max((m - I * sqrt_upper(z)).norm());
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < WEYL_TOL && secs < WEYL_BUDGET_SECS;
    report(1, "free Weyl m-function", pass, format!("max |Δ| = {worst:.2e} (tol {WEYL_TOL:e}), {secs:.2} s"));
    assert!(pass);
}

#[test]
fn criterion_02_sharp_constant() {
    let b = sharp_bounds_with_check(&Potential::zero(), FRAC_PI_2).unwrap();
    let v = b.variational.unwrap();
    let pass = (b.sup_derivative - FRAC_1_SQRT_2).abs() < SHARP_TOL
        && (b.sobolev_constant - 2f64.powf(-0.25)).abs() < SHARP_TOL
        && v >= VARIATIONAL_FRACTION * FRAC_1_SQRT_2
        && v <= b.sup_derivative * (1.0 + 1e-9);
    report(2, "sharp constant", pass, format!("sup = {:.10}, C = {:.10}, variational = {v:.6}", b.sup_derivative, b.sobolev_constant));
    assert!(pass);
}

#[test]
fn criterion_03_product_identity() {
    let mut worst = 0.0_f64;
    for alpha in [0.0, PI / 6.0, FRAC_PI_4, PI / 3.0, FRAC_PI_2] {
        let b = sharp_bounds(&Potential::zero(), alpha).unwrap();
        worst = worst.max((b.sup_derivative * b.sup_value - alpha.cos().powi(2)).abs());
    }
    let pass = worst < PRODUCT_TOL;
    report(3, "product identity", pass, format!("max |Δ| = {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_04_donoghue_normalization() {
    let mut worst = 0.0_f64;
    let mut count = 0;
    let mut record = |m: Complex64| {
        worst = worst.max((m - I).norm());
        count += 1;
    };
    let q = Potential::zero();
    for alpha in angles() {
        record(WeylDonoghue::new(&q, alpha).unwrap().m(I).unwrap());
    }
    for a in [0.2, 1.0, 3.0] {
        for alpha in angles() {
            record(LivsicInterval::new(a, alpha).unwrap().m(I).unwrap());
        }
    }
    let reg = Registry::builtin();
    for params in [json!({"n": 2, "which": "friedrichs"}), json!({"n": 3, "which": "friedrichs"}), json!({"n": 3, "which": "krein"})] {
        record(reg.build("point_interaction", &params).unwrap().eval(I).unwrap());
    }
    let mut rng = testing::rng(4);
    for _ in 0..50 {
        let n = rng.random_range(1..=8);
        let m = testing::random_atomic_measure(&mut rng, n, -10.0, 10.0, 0.01).donoghue_normalize().unwrap();
        record(donoghue_m(&m, I).unwrap());
    }
    let pass = worst < NORMALIZATION_TOL;
    report(4, "Donoghue normalization", pass, format!("{count} models, max |m(i) − i| = {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_05_perturbation_lft() {
    let mut rng = testing::rng(5);
    let mut worst = 0.0_f64;
    let mut worst_j = 0.0_f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=3.min(n));
        let t1 = testing::random_perturbation(&mut rng, n, k);
        let t2 = t1.with_l(testing::random_hermitian(&mut rng, k)).unwrap();
        let grid = testing::upper_half_plane(&mut rng, 6, -4.0, 4.0, 0.3, 5.0);
        let r = lft_consistency(&t1, &t2, &grid).unwrap();
        worst = worst.max(r.max());
        worst_j = worst_j.max(r.j_residual);
    }
    let pass = worst < LFT_TOL && worst_j < LFT_TOL;
    report(5, "perturbation LFT", pass, format!("200 instances, max residual = {worst:.2e}, J-residual = {worst_j:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_06_naimark_round_trip() {
    let mut rng = testing::rng(6);
    let (mut loc, mut weight, mut mass) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut structural = true;
    for _ in 0..100 {
        let k = rng.random_range(1..=3);
        let n_atoms = rng.random_range(1..=6);
        let omega = testing::random_matrix_measure(&mut rng, k, n_atoms);
        let (d, rep) = realize(&omega).unwrap();
        let back = spectral_measure_of(&d.h(), &d.k).unwrap();
        mass = mass.max(rep.total_mass_residual);
        if back.atoms().len() != omega.atoms().len() {
            structural = false;
            continue;
        }
        for (a, b) in omega.atoms().iter().zip(back.atoms()) {
            loc = loc.max((a.x - b.x).abs());
            weight = weight.max(nevanlinna::linalg::max_abs(&(&a.weight - &b.weight)));
        }
    }
    let pass = structural && loc < LOCATION_TOL && weight < WEIGHT_TOL && mass < MASS_TOL;
    report(6, "Naimark round trip", pass, format!("100 measures, location {loc:.2e}, weight {weight:.2e}, K*K {mass:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_07_livsic() {
    let model = LivsicInterval::new(1.0, FRAC_PI_4).unwrap();
    let t = livsic_measure(&model, DEFAULT_TRUNCATION).unwrap();
    let mut rng = testing::rng(7);
    let zs = testing::upper_half_plane(&mut rng, 10, -2.0, 2.0, 0.2, 2.0);
    let mut sum_err = 0.0_f64;
    for &z in &zs {
        sum_err = sum_err.max((donoghue_m(&t.measure, z).unwrap() - model.m(z).unwrap()).norm());
    }
    let mut residue_err = 0.0_f64;
    let mut lattice = lattice_matches_support(&model, &t.measure).unwrap();
    for (a, alpha) in [(1.0, FRAC_PI_4), (0.5, 0.3), (2.0, 2.2), (1.0, FRAC_PI_2), (0.8, 1.4)] {
        let m = LivsicInterval::new(a, alpha).unwrap();
        for n in -2..=2 {
            residue_err = residue_err.max((m.residue(n) + m.atom_mass()).abs() / m.atom_mass());
        }
        lattice &= lattice_matches_support(&m, &livsic_measure(&m, 50).unwrap().measure).unwrap();
    }
    let pass = sum_err < LIVSIC_SUM_TOL && residue_err < RESIDUE_TOL && lattice;
    report(7, "Livsic model", pass, format!("sum vs closed form {sum_err:.2e}, residues {residue_err:.2e}, lattice exact: {lattice}"));
    assert!(pass);
}

#[test]
fn criterion_08_rotations() {
    let zs = [c(0.4, 0.9), c(-2.0, 0.5), c(3.0, 2.0)];
    let table = Potential::table(vec![0.0, 1.0, 2.5], vec![1.5, -0.7, 0.4]).unwrap();
    let mut boundary = 0.0_f64;
    for q in [Potential::zero(), table.clone()] {
        for &z in &zs {
            let ms: Vec<Complex64> = angles().iter().map(|&g| weyl_m(&q, BoundaryAngle::new(g).unwrap(), z).unwrap().value).collect();
            for (i, &g) in angles().iter().enumerate() {
                for (j, &d) in angles().iter().enumerate() {
                    let r = rotate_boundary(ms[i], g, d, z).unwrap();
                    boundary = boundary.max((r - ms[j]).norm() / ms[j].norm().max(1.0));
                }
            }
        }
    }
    let mut donoghue = 0.0_f64;
    for q in [Potential::zero(), table] {
        let models: Vec<WeylDonoghue> = angles().iter().map(|&a| WeylDonoghue::new(&q, a).unwrap()).collect();
        for &z in &zs {
            let ms: Vec<Complex64> = models.iter().map(|m| m.m(z).unwrap()).collect();
            for (i, a) in models.iter().enumerate() {
                for (j, b) in models.iter().enumerate() {
                    let r = rotate_value(ms[i], b.alpha - a.alpha, z).unwrap();
                    donoghue = donoghue.max((r - ms[j]).norm() / ms[j].norm().max(1.0));
                }
            }
        }
    }
    let mut rng = testing::rng(8);
    let mut group = 0.0_f64;
    for _ in 0..200 {
        let z = testing::upper_half_plane(&mut rng, 1, -3.0, 3.0, 0.1, 3.0)[0];
        let m = c(rng.random_range(-3.0..3.0), rng.random_range(0.05..3.0));
        let (t1, t2) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let two_step = rotate_value(rotate_value(m, t1, z).unwrap(), t2, z).unwrap();
        let one_step = rotate_value(m, t1 + t2, z).unwrap();
        let shifted = rotate_value(m, t1 + PI, z).unwrap();
        let scale = one_step.norm().max(1.0);
        group = group.max((two_step - one_step).norm() / scale).max((shifted - rotate_value(m, t1, z).unwrap()).norm() / scale);
    }
    let pass = boundary < ROTATION_TOL && donoghue < ROTATION_TOL && group < GROUP_LAW_TOL;
    report(8, "boundary and Donoghue rotations", pass, format!("boundary {boundary:.2e}, Donoghue {donoghue:.2e}, group law {group:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_09_friedrichs_krein() {
    let closed = [(2, Which::Friedrichs, FkType::Both), (3, Which::Friedrichs, FkType::Friedrichs), (3, Which::Krein, FkType::Krein)];
    let mut closed_ok = true;
    let mut detail = Vec::new();
    for (n, w, want) in closed {
        let got = classify_m_function(&|l| point_interaction_m_real(n, w, l)).map(|v| v.kind);
        closed_ok &= matches!(got, Ok(k) if k == want);
        detail.push(format!("{got:?}"));
    }
    let families = [(0.5, 0.5), (-0.5, -0.5), (0.0, 0.0), (0.5, -0.5), (-0.5, 0.5), (0.0, 0.5), (0.5, 0.0), (-0.5, 0.0), (0.0, -0.5), (-0.7, 0.7)];
    let mut agree = 0;
    for (p0, pinf) in families {
        let m = power_law_measure(p0, pinf).unwrap();
        let measure_side = m.classify_extension_type().map(FkType::from);
        let m_side = classify_m_function(&|l| donoghue_m_real(&m, l)).map(|v| v.kind);
        if let (Ok(a), Ok(b)) = (measure_side, m_side) {
            if a == b {
                agree += 1;
            }
        }
    }
    let pass = closed_ok && agree == families.len();
    report(9, "Friedrichs/Krein classification", pass, format!("closed forms {}; power-law agreement {agree}/{}", detail.join(", "), families.len()));
    assert!(pass);
}

#[test]
fn criterion_10_herglotz_bounds() {
    let mut rng = testing::rng(10);
    let samples = testing::upper_half_plane(&mut rng, 40, -20.0, 20.0, 1e-2, 1e2);
    let weyl_samples = testing::upper_half_plane(&mut rng, 12, -5.0, 5.0, 0.1, 10.0);
    let reg = Registry::builtin();
    let mut models: Vec<(String, Box<dyn nevanlinna::registry::HerglotzModel>)> = Vec::new();
    let specs = [
        ("lebesgue", json!(null)),
        ("point_interaction", json!({"n": 2, "which": "friedrichs"})),
        ("point_interaction", json!({"n": 3, "which": "friedrichs"})),
        ("point_interaction", json!({"n": 3, "which": "krein"})),
        ("periodic", json!({"a": 1.0})),
        ("livsic", json!({"a": 1.0, "alpha": 0.785398})),
        ("livsic", json!({"a": 0.3, "alpha": 2.0})),
        ("power_law", json!({"p0": 0.5, "p_inf": -0.5})),
        ("weyl", json!({"gamma": 0.7})),
        ("weyl_donoghue", json!({"potential": {"grid": [0.0, 1.0, 2.0], "values": [1.0, -0.5, 0.2]}, "alpha": 1.0})),
    ];
    for (name, p) in specs {
        models.push((name.to_string(), reg.build(name, &p).unwrap()));
    }
    for i in 0..10 {
        let m = testing::random_atomic_measure(&mut rng, 5, -5.0, 5.0, 0.05).donoghue_normalize().unwrap();
        let params = json!({"measure": m});
        models.push((format!("atomic #{i}"), reg.build("measure", &params).unwrap()));
    }
    let mut min_im = f64::INFINITY;
    let mut min_bound = f64::INFINITY;
    let mut failures = Vec::new();
    for (name, m) in &models {
        let zs = if name.starts_with("weyl") { &weyl_samples } else { &samples };
        let h = verify_herglotz_scalar(&|z| m.eval(z), zs).unwrap();
        min_im = min_im.min(h.min_eigenvalue);
        if h.min_eigenvalue < -HERGLOTZ_TOL {
            failures.push(name.clone());
        }
        let normalized = m.is_donoghue() || name.starts_with("atomic");
        if normalized {
            let lb = verify_lower_bound(&|z| m.eval(z), zs, HERGLOTZ_TOL).unwrap();
            min_bound = min_bound.min(lb.quotient_margin).min(if lb.product_samples > 0 { lb.product_margin } else { f64::INFINITY });
            if !lb.pass {
                failures.push(format!("{name} (lower bound)"));
            }
        }
    }
    let pass = failures.is_empty();
    report(10, "Herglotz bounds", pass, format!("{} models, min Im = {min_im:.2e}, min bound margin = {min_bound:.2e}, failures {failures:?}", models.len()));
    assert!(pass);
}

#[test]
fn criterion_11_inversion() {
    let lebesgue = |z: Complex64| Ok(if z.im > 0.0 { I } else { -I });
    let inv = stieltjes_invert(&lebesgue, -5.0, 5.0, &DEFAULT_EPS_LADDER, 201).unwrap();
    let density_err = inv.density.iter().map(|d| (d - 1.0 / PI).abs()).fold(0.0, f64::max);
    let spurious = inv.atoms.len();
    let mut rng = testing::rng(11);
    let mut mass_err = 0.0_f64;
    let mut located = true;
    for _ in 0..10 {
        let m = testing::random_atomic_measure(&mut rng, 5, -4.0, 4.0, 0.5);
        let f = |z: Complex64| m.transform(z, Kernel::Plain);
        let inv = stieltjes_invert(&f, -5.0, 5.0, &DEFAULT_EPS_LADDER, 11).unwrap();
        if inv.atoms.len() != 5 {
            located = false;
            continue;
        }
        for (a, b) in m.atoms().iter().zip(&inv.atoms) {
            mass_err = mass_err.max((a.m - b.m).abs() / a.m);
            located &= (a.x - b.x).abs() < 1e-6;
        }
    }
    let pass = density_err < DENSITY_TOL && spurious == 0 && located && mass_err < ATOM_MASS_TOL;
    report(11, "Stieltjes inversion", pass, format!("density sup error {density_err:.2e}, spurious atoms {spurious}, atom mass error {mass_err:.2e}"));
    assert!(pass);
}

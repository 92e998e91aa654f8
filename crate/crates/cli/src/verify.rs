//! Invariant suites behind `verify`. Counts are smaller than in the test
//! suite so that `verify --suite all` stays interactive.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use nevanlinna::cmath::{sqrt_upper, I};
use nevanlinna::extensions::{classify_m_function, donoghue_m, donoghue_m_real, power_law_measure, FkType};
use nevanlinna::herglotz::{rotate_value, stieltjes_invert, verify_herglotz_scalar, verify_lower_bound, DEFAULT_EPS_LADDER};
use nevanlinna::linalg;
use nevanlinna::livsic::{lattice_matches_support, livsic_measure, LivsicInterval, DEFAULT_TRUNCATION};
use nevanlinna::measures::Kernel;
use nevanlinna::perturbation::{lft_consistency, realize, spectral_measure_of};
use nevanlinna::registry::Registry;
use nevanlinna::schrodinger::{point_interaction_m_real, rotate_boundary, sharp_bounds, sharp_bounds_with_check, weyl_m, BoundaryAngle, Potential, WeylDonoghue, Which};
use nevanlinna::testing;
use nevanlinna::{Error, Result};
use num_complex::Complex64;
use serde_json::json;

pub struct SuiteResult {
    pub suite: &'static str,
    pub pass: bool,
    pub detail: String,
}

type Suite = fn(u64, f64) -> Result<SuiteResult>;

const SUITES: [(&str, Suite); 9] = [
    ("weyl", weyl),
    ("bounds", bounds),
    ("normalization", normalization),
    ("lft", lft),
    ("naimark", naimark),
    ("livsic", livsic),
    ("rotations", rotations),
    ("classify", classify),
    ("herglotz", herglotz),
];

pub fn run(name: &str, seed: u64, tol: f64) -> Result<Vec<SuiteResult>> {
    let selected: Vec<&(&str, Suite)> = if name == "all" {
        SUITES.iter().chain(std::iter::once(&("inversion", inversion as Suite))).collect()
    } else if name == "inversion" {
        vec![&("inversion", inversion as Suite)]
    } else {
        SUITES.iter().filter(|(n, _)| *n == name).collect()
    };
    if selected.is_empty() {
        return Err(Error::BadParameters(format!("unknown suite `{name}`")));
    }
    selected.into_iter().map(|(_, f)| f(seed, tol)).collect()
}

fn result(suite: &'static str, pass: bool, detail: String) -> Result<SuiteResult> {
    Ok(SuiteResult { suite, pass, detail })
}

fn weyl(_: u64, _: f64) -> Result<SuiteResult> {
    let q = Potential::zero();
    let g = BoundaryAngle::new(0.0)?;
    let mut worst = 0.0_f64;
    for i in 0..10 {
        let z = Complex64::from_polar(10f64.powf(-1.0 + 3.0 * i as f64 / 9.0), 0.2 + 2.7 * i as f64 / 9.0);
        worst = worst.max((weyl_m(&q, g, z)?.value - I * sqrt_upper(z)).norm());
    }
    result("weyl", worst < 1e-7, format!("free m-function max error {worst:.2e}"))
}

fn bounds(_: u64, _: f64) -> Result<SuiteResult> {
    let q = Potential::zero();
    let b = sharp_bounds_with_check(&q, FRAC_PI_2)?;
    let v = b.variational.unwrap_or(0.0);
    let mut product = 0.0_f64;
    for alpha in [0.0, PI / 6.0, FRAC_PI_4, PI / 3.0, FRAC_PI_2] {
        let s = sharp_bounds(&q, alpha)?;
        product = product.max((s.product - alpha.cos().powi(2)).abs());
    }
    let pass = (b.sup_derivative - FRAC_1_SQRT_2).abs() < 1e-7 && v >= 0.98 * FRAC_1_SQRT_2 && v <= b.sup_derivative * (1.0 + 1e-9) && product < 1e-10;
    result("bounds", pass, format!("sup {:.10}, Sobolev {:.10}, variational {v:.6}, product error {product:.1e}", b.sup_derivative, b.sobolev_constant))
}

fn normalization(seed: u64, _: f64) -> Result<SuiteResult> {
    let mut worst = 0.0_f64;
    for alpha in [0.0, FRAC_PI_4, FRAC_PI_2] {
        worst = worst.max((WeylDonoghue::new(&Potential::zero(), alpha)?.m(I)? - I).norm());
        worst = worst.max((LivsicInterval::new(1.0, alpha)?.m(I)? - I).norm());
    }
    let mut rng = testing::rng(seed);
    for _ in 0..20 {
        let m = testing::random_atomic_measure(&mut rng, 5, -10.0, 10.0, 0.01).donoghue_normalize()?;
        worst = worst.max((donoghue_m(&m, I)? - I).norm());
    }
    result("normalization", worst < 1e-8, format!("max |m(i) − i| {worst:.2e}"))
}

fn lft(seed: u64, _: f64) -> Result<SuiteResult> {
    let mut rng = testing::rng(seed);
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let n = 1 + i % 8;
        let k = 1 + i % n.min(3);
        let t1 = testing::random_perturbation(&mut rng, n, k);
        let t2 = t1.with_l(testing::random_hermitian(&mut rng, k))?;
        let grid = testing::upper_half_plane(&mut rng, 4, -4.0, 4.0, 0.3, 5.0);
        worst = worst.max(lft_consistency(&t1, &t2, &grid)?.max());
    }
    result("lft", worst < 1e-10, format!("50 instances, max residual {worst:.2e}"))
}

fn naimark(seed: u64, _: f64) -> Result<SuiteResult> {
    let mut rng = testing::rng(seed);
    let mut worst = 0.0_f64;
    let mut structural = true;
    for i in 0..30 {
        let omega = testing::random_matrix_measure(&mut rng, 1 + i % 3, 1 + i % 5);
        let (d, rep) = realize(&omega)?;
        let back = spectral_measure_of(&d.h(), &d.k)?;
        structural &= back.atoms().len() == omega.atoms().len();
        worst = worst.max(rep.total_mass_residual).max(rep.max_residual);
        for (a, b) in omega.atoms().iter().zip(back.atoms()) {
            worst = worst.max((a.x - b.x).abs()).max(linalg::max_abs(&(&a.weight - &b.weight)));
        }
    }
    result("naimark", structural && worst < 1e-9, format!("30 measures, max deviation {worst:.2e}"))
}

fn livsic(_: u64, _: f64) -> Result<SuiteResult> {
    let model = LivsicInterval::new(1.0, FRAC_PI_4)?;
    let t = livsic_measure(&model, DEFAULT_TRUNCATION)?;
    let mut sum = 0.0_f64;
    for z in [Complex64::new(0.3, 0.7), Complex64::new(-1.2, 0.4), Complex64::new(2.0, 1.5)] {
        sum = sum.max((donoghue_m(&t.measure, z)? - model.m(z)?).norm());
    }
    let residue = (-2..=2).map(|n| (model.residue(n) + model.atom_mass()).abs() / model.atom_mass()).fold(0.0, f64::max);
    let lattice = lattice_matches_support(&model, &t.measure)?;
    result("livsic", sum < 1e-4 && residue < 1e-10 && lattice, format!("sum {sum:.2e}, residue {residue:.2e}, lattice exact {lattice}"))
}

fn rotations(seed: u64, _: f64) -> Result<SuiteResult> {
    let angles = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];
    let q = Potential::zero();
    let z = Complex64::new(0.4, 0.9);
    let mut worst = 0.0_f64;
    let ms: Vec<Complex64> = angles.iter().map(|&g| Ok(weyl_m(&q, BoundaryAngle::new(g)?, z)?.value)).collect::<Result<_>>()?;
    let ds: Vec<Complex64> = angles.iter().map(|&a| WeylDonoghue::new(&q, a)?.m(z)).collect::<Result<_>>()?;
    for i in 0..angles.len() {
        for j in 0..angles.len() {
            worst = worst.max((rotate_boundary(ms[i], angles[i], angles[j], z)? - ms[j]).norm());
            worst = worst.max((rotate_value(ds[i], angles[j] - angles[i], z)? - ds[j]).norm());
        }
    }
    let mut rng = testing::rng(seed);
    let mut group = 0.0_f64;
    for _ in 0..50 {
        let m = testing::upper_half_plane(&mut rng, 1, -3.0, 3.0, 0.05, 3.0)[0];
        let t = testing::upper_half_plane(&mut rng, 1, -PI, PI, 0.1, 1.0)[0];
        let (t1, t2) = (t.re, t.im);
        if let (Ok(a), Ok(b)) = (rotate_value(m, t1, z).and_then(|v| rotate_value(v, t2, z)), rotate_value(m, t1 + t2, z)) {
            group = group.max((a - b).norm() / b.norm().max(1.0));
        }
    }
    result("rotations", worst < 1e-8 && group < 1e-9, format!("rotation consistency {worst:.2e}, group law {group:.2e}"))
}

fn classify(_: u64, _: f64) -> Result<SuiteResult> {
    let expected = [(2, Which::Friedrichs, FkType::Both), (3, Which::Friedrichs, FkType::Friedrichs), (3, Which::Krein, FkType::Krein)];
    let mut ok = true;
    for (n, w, want) in expected {
        ok &= classify_m_function(&|l| point_interaction_m_real(n, w, l))?.kind == want;
    }
    let mut agree = 0;
    let families = [(0.5, 0.5), (-0.5, -0.5), (0.0, 0.0), (0.5, -0.5)];
    for (p0, pinf) in families {
        let m = power_law_measure(p0, pinf)?;
        let side = FkType::from(m.classify_extension_type()?);
        if classify_m_function(&|l| donoghue_m_real(&m, l))?.kind == side {
            agree += 1;
        }
    }
    result("classify", ok && agree == families.len(), format!("closed forms {ok}, power-law agreement {agree}/{}", families.len()))
}

fn herglotz(seed: u64, tol: f64) -> Result<SuiteResult> {
    let reg = Registry::builtin();
    let mut rng = testing::rng(seed);
    let samples = testing::upper_half_plane(&mut rng, 20, -10.0, 10.0, 1e-2, 1e2);
    let specs = [
        ("lebesgue", json!(null)),
        ("point_interaction", json!({"n": 3, "which": "krein"})),
        ("periodic", json!({"a": 1.0})),
        ("livsic", json!({"a": 1.0, "alpha": 0.5})),
        ("power_law", json!({"p0": 0.5, "p_inf": -0.5})),
    ];
    let mut min_margin = f64::INFINITY;
    let mut pass = true;
    let slack = tol.max(1e-8);
    for (name, p) in specs {
        let m = reg.build(name, &p)?;
        let h = verify_herglotz_scalar(&|z| m.eval(z), &samples)?;
        let lb = verify_lower_bound(&|z| m.eval(z), &samples, slack)?;
        pass &= h.min_eigenvalue >= -slack && lb.pass;
        min_margin = min_margin.min(lb.quotient_margin);
    }
    result("herglotz", pass, format!("min lower-bound margin {min_margin:.2e}"))
}

fn inversion(seed: u64, _: f64) -> Result<SuiteResult> {
    let lebesgue = |z: Complex64| Ok(if z.im > 0.0 { I } else { -I });
    let inv = stieltjes_invert(&lebesgue, -5.0, 5.0, &DEFAULT_EPS_LADDER, 101)?;
    let density = inv.density.iter().map(|d| (d - 1.0 / PI).abs()).fold(0.0, f64::max);
    let mut rng = testing::rng(seed);
    let m = testing::random_atomic_measure(&mut rng, 5, -4.0, 4.0, 0.5);
    let inv2 = stieltjes_invert(&|z| m.transform(z, Kernel::Plain), -5.0, 5.0, &DEFAULT_EPS_LADDER, 11)?;
    let found = inv2.atoms.len() == 5;
    let mass = if found { m.atoms().iter().zip(&inv2.atoms).map(|(a, b)| (a.m - b.m).abs() / a.m).fold(0.0, f64::max) } else { f64::INFINITY };
    result("inversion", density < 1e-3 && inv.atoms.is_empty() && mass < 1e-3, format!("density error {density:.2e}, atom mass error {mass:.2e}"))
}

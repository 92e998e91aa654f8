//! Scalar Herglotz models addressable by name, built from JSON parameters.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use crate::cmath::I;
use crate::error::{Error, Result};
use crate::extensions::{power_law_measure, DonoghueModel};
use crate::herglotz::HerglotzRep;
use crate::livsic::{periodic_donoghue_m, LivsicInterval};
use crate::measures::{Kernel, Measure};
use crate::schrodinger::{point_interaction_m, point_interaction_m_real, weyl_m, BoundaryAngle, Potential, WeylDonoghue, Which};

type C = Complex64;

/// A scalar function on `ℂ \ ℝ` with nonnegative imaginary part on `ℂ₊`.
pub trait HerglotzModel: Send + Sync {
    fn name(&self) -> &str;

    fn eval(&self, z: C) -> Result<C>;

    /// Values on the real axis where the model continues analytically.
    fn eval_real(&self, lambda: f64) -> Result<f64> {
        Err(Error::EvalOnRealAxis(C::new(lambda, 0.0)))
    }

    /// The representing measure, when the model carries one explicitly.
    fn measure(&self) -> Option<&Measure> {
        None
    }

    /// Whether the model is normalized so that `m(i) = i`.
    fn is_donoghue(&self) -> bool {
        false
    }
}

pub type Factory = fn(&Value) -> Result<Box<dyn HerglotzModel>>;

pub struct Registry {
    factories: BTreeMap<&'static str, (Factory, &'static str)>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::builtin()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry { factories: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Registry::empty();
        r.register("lebesgue", lebesgue, "constant i, the Donoghue m-function of dλ/π; no parameters");
        r.register("measure", measure_model, "{\"measure\": <measure>, \"c\"?, \"d\"?, \"kernel\"?: \"full\"|\"plain\"}");
        r.register("donoghue", donoghue, "{\"measure\": <normalized measure>, \"alpha\"}");
        r.register("power_law", power_law, "{\"p0\", \"p_inf\", \"alpha\"?}");
        r.register("point_interaction", point_interaction, "{\"n\": 2|3, \"which\": \"friedrichs\"|\"krein\"}");
        r.register("periodic", periodic, "{\"a\"}");
        r.register("livsic", livsic, "{\"a\", \"alpha\"}");
        r.register("weyl", weyl, "{\"potential\"?, \"gamma\"?}");
        r.register("weyl_donoghue", weyl_donoghue, "{\"potential\"?, \"alpha\"?}");
        r
    }

    pub fn register(&mut self, name: &'static str, factory: Factory, params: &'static str) {
        self.factories.insert(name, (factory, params));
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn describe(&self, name: &str) -> Option<&'static str> {
        self.factories.get(name).map(|(_, d)| *d)
    }

    pub fn build(&self, name: &str, params: &Value) -> Result<Box<dyn HerglotzModel>> {
        let (factory, _) = self.factories.get(name).ok_or_else(|| Error::UnknownModel(name.to_string()))?;
        factory(params)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    let v = if v.is_null() { Value::Object(Default::default()) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| Error::BadParameters(e.to_string()))
}

/// `"zero"`, `{"constant": q}`, or `{"grid": [...], "values": [...]}`.
pub fn potential_from_json(v: &Value) -> Result<Potential> {
    #[derive(Deserialize)]
    #[serde(untagged, deny_unknown_fields)]
    enum Raw {
        Name(String),
        Constant { constant: f64 },
        Table { grid: Vec<f64>, values: Vec<f64> },
    }
    match serde_json::from_value::<Raw>(v.clone()).map_err(|e| Error::InvalidPotential(e.to_string()))? {
        Raw::Name(s) if s == "zero" => Ok(Potential::zero()),
        Raw::Name(s) => Err(Error::InvalidPotential(format!("unknown potential {s:?}"))),
        Raw::Constant { constant } => Potential::constant(constant),
        Raw::Table { grid, values } => Potential::table(grid, values),
    }
}

struct Lebesgue;

impl HerglotzModel for Lebesgue {
    fn name(&self) -> &str {
        "lebesgue"
    }
    fn eval(&self, z: C) -> Result<C> {
        match z.im {
            y if y > 0.0 => Ok(I),
            y if y < 0.0 => Ok(-I),
            _ => Err(Error::EvalOnRealAxis(z)),
        }
    }
    fn is_donoghue(&self) -> bool {
        true
    }
}

fn lebesgue(_: &Value) -> Result<Box<dyn HerglotzModel>> {
    Ok(Box::new(Lebesgue))
}

struct Represented {
    rep: HerglotzRep,
    measure: Measure,
}

impl HerglotzModel for Represented {
    fn name(&self) -> &str {
        "measure"
    }
    fn eval(&self, z: C) -> Result<C> {
        self.rep.eval_scalar(z)
    }
    fn eval_real(&self, lambda: f64) -> Result<f64> {
        self.rep.eval_real(lambda)
    }
    fn measure(&self) -> Option<&Measure> {
        Some(&self.measure)
    }
}

fn measure_model(v: &Value) -> Result<Box<dyn HerglotzModel>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct P {
        measure: Measure,
        #[serde(default)]
        c: f64,
        #[serde(default)]
        d: f64,
        #[serde(default = "full")]
        kernel: Kernel,
    }
    fn full() -> Kernel {
        Kernel::Full
    }
    let p: P = parse(v)?;
    let rep = HerglotzRep::scalar(p.c, p.d, p.measure.clone(), p.kernel)?;
    Ok(Box::new(Represented { rep, measure: p.measure }))
}

struct Donoghue(DonoghueModel);

impl HerglotzModel for Donoghue {
    fn name(&self) -> &str {
        "donoghue"
    }
    fn eval(&self, z: C) -> Result<C> {
        self.0.m(z)
    }
    fn eval_real(&self, lambda: f64) -> Result<f64> {
        self.0.m_real(lambda)
    }
    fn measure(&self) -> Option<&Measure> {
        Some(self.0.measure())
    }
    fn is_donoghue(&self) -> bool {
        true
    }
}

fn donoghue(v: &Value) -> Result<Box<dyn HerglotzModel>> {
    Ok(Box::new(Donoghue(parse::<DonoghueModel>(v)?)))
}

fn power_law(v: &Value) -> Result<Box<dyn HerglotzModel>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct P {
        p0: f64,
        p_inf: f64,
        #[serde(default = "right_angle")]
        alpha: f64,
    }
    fn right_angle() -> f64 {
        FRAC_PI_2
    }
    let p: P = parse(v)?;
    Ok(Box::new(Donoghue(DonoghueModel::new(power_law_measure(p.p0, p.p_inf)?, p.alpha)?)))
}

struct PointInteraction {
    n: u32,
    which: Which,
}

impl HerglotzModel for PointInteraction {
    fn name(&self) -> &str {
        "point_interaction"
    }
    fn eval(&self, z: C) -> Result<C> {
        point_interaction_m(self.n, self.which, z)
    }
    fn eval_real(&self, lambda: f64) -> Result<f64> {
        point_interaction_m_real(self.n, self.which, lambda)
    }
    fn is_donoghue(&self) -> bool {
        true
    }
}

fn point_interaction(v: &Value) -> Result<Box<dyn HerglotzModel>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct P {
        n: u32,
        which: Which,
    }
    let p: P = parse(v)?;
    // rejects unsupported combinations up front
    point_interaction_m(p.n, p.which, I)?;
    Ok(Box::new(PointInteraction { n: p.n, which: p.which }))
}

struct Periodic(f64);

impl HerglotzModel for Periodic {
    fn name(&self) -> &str {
        "periodic"
    }
    fn eval(&self, z: C) -> Result<C> {
        periodic_donoghue_m(self.0, z)
    }
    fn is_donoghue(&self) -> bool {
        true
    }
}

fn periodic(v: &Value) -> Result<Box<dyn HerglotzModel>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct P {
        a: f64,
    }
    let p: P = parse(v)?;
    periodic_donoghue_m(p.a, I)?;
    Ok(Box::new(Periodic(p.a)))
}

struct Livsic(LivsicInterval);

impl HerglotzModel for Livsic {
    fn name(&self) -> &str {
        "livsic"
    }
    fn eval(&self, z: C) -> Result<C> {
        self.0.m(z)
    }
    fn is_donoghue(&self) -> bool {
        true
    }
}

fn livsic(v: &Value) -> Result<Box<dyn HerglotzModel>> {
    Ok(Box::new(Livsic(parse::<LivsicInterval>(v)?)))
}

struct Weyl {
    q: Potential,
    gamma: BoundaryAngle,
}

impl HerglotzModel for Weyl {
    fn name(&self) -> &str {
        "weyl"
    }
    fn eval(&self, z: C) -> Result<C> {
        Ok(weyl_m(&self.q, self.gamma, z)?.value)
    }
    fn eval_real(&self, lambda: f64) -> Result<f64> {
        crate::schrodinger::weyl_m_real(&self.q, self.gamma, lambda)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeylParams {
    #[serde(default = "zero_potential")]
    potential: Value,
    #[serde(default)]
    gamma: f64,
    #[serde(default = "right_angle")]
    alpha: f64,
}

fn zero_potential() -> Value {
    Value::String("zero".into())
}

fn right_angle() -> f64 {
    FRAC_PI_2
}

fn weyl(v: &Value) -> Result<Box<dyn HerglotzModel>> {
    let p: WeylParams = parse(v)?;
    Ok(Box::new(Weyl { q: potential_from_json(&p.potential)?, gamma: BoundaryAngle::new(p.gamma)? }))
}

struct WeylNormalized(WeylDonoghue);

impl HerglotzModel for WeylNormalized {
    fn name(&self) -> &str {
        "weyl_donoghue"
    }
    fn eval(&self, z: C) -> Result<C> {
        self.0.m(z)
    }
    fn is_donoghue(&self) -> bool {
        true
    }
}

fn weyl_donoghue(v: &Value) -> Result<Box<dyn HerglotzModel>> {
    let p: WeylParams = parse(v)?;
    Ok(Box::new(WeylNormalized(WeylDonoghue::new(&potential_from_json(&p.potential)?, p.alpha)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmath::c;
    use serde_json::json;

    #[test]
    fn builtin_models_are_normalized() {
        let reg = Registry::builtin();
        let cases = [
            ("lebesgue", json!(null)),
            ("point_interaction", json!({"n": 3, "which": "krein"})),
            ("periodic", json!({"a": 1.5})),
            ("livsic", json!({"a": 1.0, "alpha": 0.785398})),
            ("power_law", json!({"p0": 0.5, "p_inf": 0.5})),
            ("weyl_donoghue", json!({})),
        ];
        for (name, params) in cases {
            let m = reg.build(name, &params).unwrap();
            assert!(m.is_donoghue());
            assert!((m.eval(I).unwrap() - I).norm() < 1e-8, "{name}");
        }
    }

    #[test]
    fn measure_and_weyl_models() {
        let reg = Registry::builtin();
        let m = reg.build("measure", &json!({"measure": {"atoms": [{"x": 0.0, "m": 1.0}]}, "kernel": "plain"})).unwrap();
        assert!((m.eval(I).unwrap() - I).norm() < 1e-15);
        let w = reg.build("weyl", &json!({"potential": {"constant": 0.0}})).unwrap();
        let z = c(0.2, 0.9);
        assert!((w.eval(z).unwrap() - I * crate::cmath::sqrt_upper(z)).norm() < 1e-7);
    }

    #[test]
    fn errors() {
        let reg = Registry::builtin();
        assert!(matches!(reg.build("nope", &json!({})), Err(Error::UnknownModel(_))));
        assert!(matches!(reg.build("periodic", &json!({"b": 1})), Err(Error::BadParameters(_))));
        assert!(matches!(reg.build("point_interaction", &json!({"n": 2, "which": "krein"})), Err(Error::InvalidCombination(_))));
    }
}

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("integral diverges: {0}")]
    DivergentIntegral(String),
    #[error("adaptive quadrature stalled: estimate {estimate:e}, error {error:e}")]
    QuadratureFailure { estimate: f64, error: f64 },
    #[error("measure has zero weighted mass")]
    ZeroMeasure,
    #[error("measure support leaks below zero (min support point {0:e})")]
    UnsupportedMeasure(f64),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("evaluation on the real axis at z = {0}")]
    EvalOnRealAxis(Complex64),
    #[error("singular LFT denominator at z = {z} (condition number {condition:e})")]
    SingularDenominator { z: Complex64, condition: f64 },
    #[error("non-Herglotz sample at z = {z}: Im M = {im:e}")]
    NonHerglotzSample { z: Complex64, im: f64 },
    #[error("z = {0} outside the validity rectangle of the continuation")]
    OutsideValidityRectangle(Complex64),
    #[error("resolvent nearly singular: |Im z| = {0:e}")]
    NearSingularResolvent(f64),
    #[error("Hermitian eigensolver failed")]
    EigensolverFailure,
    #[error("weight is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("ODE step size underflow at x = {0}")]
    StepSizeUnderflow(f64),
    #[error("Weyl limit did not converge: disk radius trend {0:?}")]
    NoConvergence(Vec<f64>),
    #[error("invalid combination: {0}")]
    InvalidCombination(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("grid too large: {0} points (limit 1000000)")]
    GridTooLarge(usize),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Module-qualified error code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DivergentIntegral(_) => "measures.DivergentIntegral",
            Error::QuadratureFailure { .. } => "measures.QuadratureFailure",
            Error::ZeroMeasure => "measures.ZeroMeasure",
            Error::UnsupportedMeasure(_) => "measures.UnsupportedMeasure",
            Error::Inconclusive(_) => "measures.Inconclusive",
            Error::InvalidMeasure(_) => "measures.InvalidMeasure",
            Error::InvalidMatrix(_) => "herglotz.InvalidMatrix",
            Error::EvalOnRealAxis(_) => "herglotz.EvalOnRealAxis",
            Error::SingularDenominator { .. } => "herglotz.SingularDenominator",
            Error::NonHerglotzSample { .. } => "herglotz.NonHerglotzSample",
            Error::OutsideValidityRectangle(_) => "herglotz.OutsideValidityRectangle",
            Error::NearSingularResolvent(_) => "perturbation.NearSingularResolvent",
            Error::EigensolverFailure => "perturbation.EigensolverFailure",
            Error::NotPsd(_) => "perturbation.NotPSD",
            Error::StepSizeUnderflow(_) => "schrodinger.StepSizeUnderflow",
            Error::NoConvergence(_) => "schrodinger.NoConvergence",
            Error::InvalidCombination(_) => "schrodinger.InvalidCombination",
            Error::InvalidPotential(_) => "schrodinger.InvalidPotential",
            Error::InvalidModel(_) => "livsic.InvalidModel",
            Error::GridTooLarge(_) => "cli.GridTooLarge",
            Error::UnknownModel(_) => "registry.UnknownModel",
            Error::BadParameters(_) => "registry.BadParameters",
            Error::Json(_) => "io.Json",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

mod output;
mod verify;

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nevanlinna::extensions::{classify_m_function, DonoghueModel};
use nevanlinna::herglotz::{rotate_value, stieltjes_invert, JUnitary, DEFAULT_EPS_LADDER};
use nevanlinna::io::{matrix_from_json, matrix_to_json, parse_complex, JsonMatrix};
use nevanlinna::livsic::{livsic_measure, quasihermitian_spectrum, spectrum_model_of, LivsicInterval};
use nevanlinna::measures::{Measure, MatrixMeasure};
use nevanlinna::perturbation::{lft_consistency, naimark_dilate, realize, PerturbationTriple, REALIZATION_TOL};
use nevanlinna::registry::{potential_from_json, HerglotzModel, Registry};
use nevanlinna::schrodinger::{sharp_bounds, sharp_bounds_with_check, weyl_m_with, BoundaryAngle, Potential, WeylDonoghue, WeylOptions};
use nevanlinna::{Error, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

use output::{num, pair, Format, Output};

/// Largest sweep accepted.
const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Parser)]
#[command(name = "nevanlinna", version, about = "Herglotz–Nevanlinna functions, m-functions and their spectral measures")]
struct Cli {
    /// Numerical tolerance for iterative computations and verification.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Points {
    /// Single evaluation point `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Real-part range of a sweep, `lo:hi:n`.
    #[arg(long, allow_hyphen_values = true, requires = "im")]
    re: Option<String>,
    /// Imaginary-part range of a sweep, `lo:hi:n`.
    #[arg(long, allow_hyphen_values = true, requires = "re")]
    im: Option<String>,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Registered model name (see `models`).
    #[arg(long)]
    model: String,
    /// Model parameters as JSON, or `@file`.
    #[arg(long, default_value = "{}")]
    params: String,
}

#[derive(Subcommand)]
enum Command {
    /// List registered models and their parameters.
    Models,
    /// Evaluate a model at a point or over a grid.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        points: Points,
    },
    /// Recover the measure of a model on an interval from boundary values.
    Invert {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 201)]
        n_grid: usize,
        /// Decreasing ε ladder, comma separated.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Apply a J-unitary linear fractional map to a model or matrix.
    Lft {
        /// JSON file with blocks `A11`, `A12`, `A21`, `A22`.
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value = "{}")]
        params: String,
        /// Matrix value (JSON rows of `[re, im]`) instead of a model.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[command(flatten)]
        points: Points,
    },
    /// Rotate a scalar model through an angle.
    Rotate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[command(flatten)]
        points: Points,
    },
    /// m-function of a finite perturbation triple `(H0, K, L)`.
    Perturb {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Second coupling; reports the consistency residuals between the two.
        #[arg(long)]
        l2: Option<PathBuf>,
    },
    /// Naimark dilation of a finitely supported matrix measure.
    Dilate {
        #[arg(long)]
        measure: PathBuf,
    },
    /// Dilation plus verification of the realized m-function.
    Realize {
        #[arg(long)]
        measure: PathBuf,
    },
    /// Weyl–Titchmarsh m-function of a half-line Schrödinger operator.
    Weyl {
        /// `zero` or a two-column CSV file `(x, q)`.
        #[arg(long, default_value = "zero")]
        q: String,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[command(flatten)]
        points: Points,
    },
    /// Donoghue-normalized m-function from a potential or a measure.
    Donoghue {
        #[arg(long, conflicts_with = "measure")]
        q: Option<String>,
        /// Measure JSON file.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long, default_value_t = FRAC_PI_2)]
        alpha: f64,
        #[command(flatten)]
        points: Points,
    },
    /// Sharp point-evaluation bounds for a potential.
    Bounds {
        #[arg(long, default_value = "zero")]
        q: String,
        #[arg(long, default_value_t = FRAC_PI_2)]
        alpha: f64,
        /// Also compute the variational lower estimate.
        #[arg(long)]
        variational: bool,
    },
    /// Friedrichs/Krein identification of a model.
    Classify {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Interval model with half-length `a` and angle `alpha`.
    Livsic {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        points: Points,
    },
    /// Truncated point measure of the interval model.
    LivsicMeasure {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
    },
    /// Run invariant suites; exit code 2 if any fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn verb(c: &Command) -> &'static str {
    match c {
        Command::Models => "models",
        Command::Eval { .. } => "eval",
        Command::Invert { .. } => "invert",
        Command::Lft { .. } => "lft",
        Command::Rotate { .. } => "rotate",
        Command::Perturb { .. } => "perturb",
        Command::Dilate { .. } => "dilate",
        Command::Realize { .. } => "realize",
        Command::Weyl { .. } => "weyl",
        Command::Donoghue { .. } => "donoghue",
        Command::Bounds { .. } => "bounds",
        Command::Classify { .. } => "classify",
        Command::Livsic { .. } => "livsic",
        Command::LivsicMeasure { .. } => "livsic-measure",
        Command::Verify { .. } => "verify",
    }
}

enum Outcome {
    Done,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let header = format!("nevanlinna {} verb={} seed={} tol={:e}", env!("CARGO_PKG_VERSION"), verb(&cli.command), cli.seed, cli.tol);
    eprintln!("# {header}");
    let result = Output::open(cli.out.as_deref(), cli.format, header).and_then(|mut out| {
        let r = run(&cli, &mut out)?;
        out.finish()?;
        Ok(r)
    });
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}

fn read_file(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::BadParameters(format!("{}: {e}", p.display())))
}

fn read_json(p: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&read_file(p)?)?)
}

fn json_arg(s: &str) -> Result<Value> {
    match s.strip_prefix('@') {
        Some(path) => read_json(Path::new(path)),
        None => Ok(serde_json::from_str(s)?),
    }
}

fn potential_arg(s: &str) -> Result<Potential> {
    if s == "zero" {
        return Ok(Potential::zero());
    }
    if let Some(rest) = s.strip_prefix("json:") {
        return potential_from_json(&serde_json::from_str(rest)?);
    }
    let f = fs::File::open(s).map_err(|e| Error::InvalidPotential(format!("{s}: {e}")))?;
    Potential::from_csv(f)
}

fn parse_range(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::BadParameters(format!("range `{s}` must be lo:hi:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
    let hi = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
    let n = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    Ok((lo, hi, n))
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

enum PointSet {
    Single(Complex64),
    Grid { re: (f64, f64, usize), im: (f64, f64, usize) },
}

impl PointSet {
    fn from_args(p: &Points) -> Result<Self> {
        match (&p.z, &p.re, &p.im) {
            (Some(z), None, None) => Ok(PointSet::Single(parse_complex(z)?)),
            (None, Some(re), Some(im)) => {
                let re = parse_range(re)?;
                let im = parse_range(im)?;
                let total = re.2.saturating_mul(im.2);
                if total > MAX_GRID_POINTS {
                    return Err(Error::GridTooLarge(total));
                }
                Ok(PointSet::Grid { re, im })
            }
            _ => Err(Error::BadParameters("give either --z or both --re and --im".into())),
        }
    }

    /// Row-major: imaginary part outer, real part inner.
    fn iter(&self) -> Box<dyn Iterator<Item = Complex64> + '_> {
        match *self {
            PointSet::Single(z) => Box::new(std::iter::once(z)),
            PointSet::Grid { re, im } => Box::new(linspace(im.0, im.1, im.2).flat_map(move |y| linspace(re.0, re.1, re.2).map(move |x| Complex64::new(x, y)))),
        }
    }
}

/// Evaluates `f` over the point set, streaming CSV rows or collecting a JSON
/// list. Extra columns beyond the value come from `extra`.
fn sweep(out: &mut Output, points: &Points, value_cols: [&str; 2], extra: &[&str], f: &dyn Fn(Complex64) -> Result<(Complex64, Vec<f64>)>) -> Result<()> {
    let set = PointSet::from_args(points)?;
    match out.format {
        Format::Csv => {
            let mut cols = vec!["re_z", "im_z", value_cols[0], value_cols[1]];
            cols.extend_from_slice(extra);
            out.csv_header(&cols)?;
            for z in set.iter() {
                let (m, more) = f(z)?;
                let mut row = vec![num(z.re), num(z.im), num(m.re), num(m.im)];
                row.extend(more.into_iter().map(num));
                out.csv_row(&row)?;
            }
            Ok(())
        }
        Format::Json => {
            let mut rows = Vec::new();
            for z in set.iter() {
                let (m, more) = f(z)?;
                let mut obj = json!({"z": pair(z), "m": pair(m)});
                for (k, v) in extra.iter().zip(more) {
                    obj[*k] = json!(v);
                }
                rows.push(obj);
            }
            let v = match set {
                PointSet::Single(_) => rows.pop().expect("one row"),
                PointSet::Grid { .. } => Value::Array(rows),
            };
            out.json(&v)
        }
    }
}

fn build_model(reg: &Registry, m: &ModelArgs) -> Result<Box<dyn HerglotzModel>> {
    reg.build(&m.model, &json_arg(&m.params)?)
}

fn run(cli: &Cli, out: &mut Output) -> Result<Outcome> {
    let reg = Registry::builtin();
    match &cli.command {
        Command::Models => {
            let list: Vec<Value> = reg.names().map(|n| json!({"name": n, "params": reg.describe(n)})).collect();
            match out.format {
                Format::Json => out.json(&Value::Array(list))?,
                Format::Csv => {
                    out.csv_header(&["name", "params"])?;
                    for n in reg.names() {
                        out.csv_row(&[n.to_string(), reg.describe(n).unwrap_or_default().to_string()])?;
                    }
                }
            }
        }
        Command::Eval { model, points } => {
            let m = build_model(&reg, model)?;
            sweep(out, points, ["re_M", "im_M"], &[], &|z| Ok((m.eval(z)?, vec![])))?;
        }
        Command::Rotate { model, theta, points } => {
            let m = build_model(&reg, model)?;
            sweep(out, points, ["re_M", "im_M"], &[], &|z| Ok((rotate_value(m.eval(z)?, *theta, z)?, vec![])))?;
        }
        Command::Invert { model, a, b, n_grid, eps } => {
            let m = build_model(&reg, model)?;
            let ladder: Vec<f64> = match eps {
                Some(s) => s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| Error::BadParameters(format!("bad ε ladder `{s}`")))).collect::<Result<_>>()?,
                None => DEFAULT_EPS_LADDER.to_vec(),
            };
            if *n_grid > MAX_GRID_POINTS {
                return Err(Error::GridTooLarge(*n_grid));
            }
            let inv = stieltjes_invert(&|z| m.eval(z), *a, *b, &ladder, *n_grid)?;
            match out.format {
                Format::Json => out.json(&serde_json::to_value(inv.to_measure()?)?)?,
                Format::Csv => {
                    out.csv_header(&["lambda", "density", "atom_mass"])?;
                    for (l, d) in inv.grid.iter().zip(&inv.density) {
                        out.csv_row(&[num(*l), num(*d), num(0.0)])?;
                    }
                    for at in &inv.atoms {
                        out.csv_row(&[num(at.x), num(0.0), num(at.m)])?;
                    }
                }
            }
        }
        Command::Lft { map, model, params, matrix, points } => {
            let a = JUnitary::from_json(&read_json(map)?)?;
            match (model, matrix) {
                (Some(name), None) => {
                    if a.dimension() != 1 {
                        return Err(Error::InvalidMatrix(format!("a {}×{} map cannot act on a scalar model", 2 * a.dimension(), 2 * a.dimension())));
                    }
                    let m = reg.build(name, &json_arg(params)?)?;
                    sweep(out, points, ["re_M", "im_M"], &[], &|z| Ok((a.apply_scalar(m.eval(z)?, z)?, vec![])))?;
                }
                (None, Some(path)) => {
                    let rows: JsonMatrix = serde_json::from_value(read_json(path)?)?;
                    let m = matrix_from_json(&rows)?;
                    let z = match PointSet::from_args(points)? {
                        PointSet::Single(z) => z,
                        PointSet::Grid { .. } => return Err(Error::BadParameters("matrix input takes a single --z".into())),
                    };
                    out.json(&json!({"z": pair(z), "M": matrix_to_json(&a.apply(&m, z)?)}))?;
                }
                _ => return Err(Error::BadParameters("give exactly one of --model or --matrix".into())),
            }
        }
        Command::Perturb { triple, z, l2 } => {
            let t = PerturbationTriple::from_json(&read_json(triple)?)?;
            let z = parse_complex(z)?;
            let m = t.m_function(z)?;
            let mut v = json!({"z": pair(z), "M": matrix_to_json(&m)});
            let mut failed = false;
            if let Some(p) = l2 {
                let rows: JsonMatrix = serde_json::from_value(read_json(p)?)?;
                let t2 = t.with_l(matrix_from_json(&rows)?)?;
                let grid = [z, Complex64::new(z.re, -z.im)];
                let r = lft_consistency(&t, &t2, &grid)?;
                failed = r.max() > cli.tol.max(1e-10);
                v["M2"] = json!(matrix_to_json(&t2.m_function(z)?));
                v["consistency"] = json!({
                    "right_form": r.right_form, "left_form": r.left_form,
                    "right_inverse": r.right_inverse, "left_inverse": r.left_inverse,
                    "j_residual": r.j_residual, "lft_form": r.lft_form, "pass": !failed,
                });
            }
            match out.format {
                Format::Json => out.json(&v)?,
                Format::Csv => {
                    out.csv_header(&["re_z", "im_z", "row", "col", "re_M", "im_M"])?;
                    for i in 0..m.nrows() {
                        for j in 0..m.ncols() {
                            out.csv_row(&[num(z.re), num(z.im), i.to_string(), j.to_string(), num(m[(i, j)].re), num(m[(i, j)].im)])?;
                        }
                    }
                }
            }
            if failed {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Dilate { measure } => {
            let omega = MatrixMeasure::from_json(&read_json(measure)?)?;
            out.json(&naimark_dilate(&omega)?.to_json())?;
        }
        Command::Realize { measure } => {
            let omega = MatrixMeasure::from_json(&read_json(measure)?)?;
            let (d, rep) = realize(&omega)?;
            let pass = rep.max_residual <= REALIZATION_TOL && rep.total_mass_residual <= REALIZATION_TOL;
            out.json(&json!({"dilation": d.to_json(), "max_residual": rep.max_residual, "total_mass_residual": rep.total_mass_residual, "pass": pass}))?;
            if !pass {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Weyl { q, gamma, points } => {
            let q = potential_arg(q)?;
            let g = BoundaryAngle::new(*gamma)?;
            let opts = WeylOptions { tol: cli.tol, ..WeylOptions::default() };
            sweep(out, points, ["re_m", "im_m"], &["err_est"], &|z| {
                let r = weyl_m_with(&q, g, z, &opts)?;
                Ok((r.value, vec![r.richardson_error]))
            })?;
        }
        Command::Donoghue { q, measure, alpha, points } => match (q, measure) {
            (_, Some(path)) => {
                let m: Measure = serde_json::from_value(read_json(path)?)?;
                let model = DonoghueModel::new(m, *alpha)?;
                sweep(out, points, ["re_m", "im_m"], &[], &|z| Ok((model.m(z)?, vec![])))?;
            }
            (q, None) => {
                let model = WeylDonoghue::new(&potential_arg(q.as_deref().unwrap_or("zero"))?, *alpha)?;
                sweep(out, points, ["re_m", "im_m"], &[], &|z| Ok((model.m(z)?, vec![])))?;
            }
        },
        Command::Bounds { q, alpha, variational } => {
            let q = potential_arg(q)?;
            let b = if *variational { sharp_bounds_with_check(&q, *alpha)? } else { sharp_bounds(&q, *alpha)? };
            match out.format {
                Format::Json => out.json(&serde_json::to_value(b)?)?,
                Format::Csv => {
                    out.csv_header(&["sup_derivative", "sup_value", "product", "sobolev_constant", "variational"])?;
                    out.csv_row(&[num(b.sup_derivative), num(b.sup_value), num(b.product), num(b.sobolev_constant), b.variational.map(num).unwrap_or_default()])?;
                }
            }
        }
        Command::Classify { model } => {
            let m = build_model(&reg, model)?;
            let verdict = classify_m_function(&|l| m.eval_real(l))?;
            let mut v = serde_json::to_value(&verdict)?;
            if let Some(measure) = m.measure() {
                let side = nevanlinna::extensions::FkType::from(measure.classify_extension_type()?);
                if side != verdict.kind {
                    return Err(Error::Inconclusive(format!("m-side verdict {:?} disagrees with measure-side verdict {side:?}", verdict.kind)));
                }
                v["n0_class"] = serde_json::to_value(nevanlinna::herglotz::n0_membership(measure)?)?;
            }
            out.json(&v)?;
        }
        Command::Livsic { a, alpha, points } => {
            let model = LivsicInterval::new(*a, *alpha)?;
            sweep(out, points, ["re_m", "im_m"], &[], &|z| Ok((model.m(z)?, vec![])))?;
        }
        Command::LivsicMeasure { a, alpha, n } => {
            let model = LivsicInterval::new(*a, *alpha)?;
            if n.saturating_mul(2).saturating_add(1) > MAX_GRID_POINTS {
                return Err(Error::GridTooLarge(2 * n + 1));
            }
            let t = livsic_measure(&model, *n)?;
            let residue_ok = (-2..=2).all(|k| (model.residue(k) + model.atom_mass()).abs() <= 1e-10 * model.atom_mass());
            eprintln!("# beta={} mass={} tail_bound={:e} spectrum={}", model.beta, model.atom_mass(), t.tail_bound, serde_json::to_string(&quasihermitian_spectrum(&spectrum_model_of(&model))?)?);
            match out.format {
                Format::Json => out.json(&serde_json::to_value(&t.measure)?)?,
                Format::Csv => {
                    out.csv_header(&["x", "m"])?;
                    for at in t.measure.atoms() {
                        out.csv_row(&[num(at.x), num(at.m)])?;
                    }
                }
            }
            if !residue_ok {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Verify { suite } => {
            let results = verify::run(suite, cli.seed, cli.tol)?;
            let all = results.iter().all(|r| r.pass);
            match out.format {
                Format::Json => out.json(&json!({"pass": all, "suites": results.iter().map(|r| json!({"suite": r.suite, "pass": r.pass, "detail": r.detail})).collect::<Vec<_>>()}))?,
                Format::Csv => {
                    out.csv_header(&["suite", "pass", "detail"])?;
                    for r in &results {
                        out.csv_row(&[r.suite.to_string(), r.pass.to_string(), r.detail.clone()])?;
                    }
                }
            }
            if !all {
                return Ok(Outcome::VerificationFailed);
            }
        }
    }
    Ok(Outcome::Done)
}
